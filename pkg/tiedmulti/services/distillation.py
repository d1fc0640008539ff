"""Sequence-level distillation from a parent model into tied-multi children."""

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from tiedmulti.adapters.data.corpus import write_corpus
from tiedmulti.adapters.reports.tables import ReportTable, write_csv, write_json, write_text
from tiedmulti.adapters.text.vocabulary import Vocabulary
from tiedmulti.config.experiment import BeamConfig, TrainingConfig
from tiedmulti.core.kinds import ChildKind, DecodeMode, ModelKind
from tiedmulti.core.models import (
    DistillationReport,
    GreedyBeamGrid,
    SentencePair,
    all_combinations,
)
from tiedmulti.model.checkpoint import load_checkpoint
from tiedmulti.model.transformer import Parameters
from tiedmulti.services.evaluation import decode_and_log, evaluate_records
from tiedmulti.training.batching import EncodedPair
from tiedmulti.training.distill import PseudoParallelCorpus, generate_distillation_corpus
from tiedmulti.training.trainer import train
from tiedmulti.utils.logger import logger

PSEUDO_CORPUS = "pseudo.tsv"
REPORT_JSON = "distillation.json"
REPORT_TEXT = "distillation.txt"
REPORT_CSV = "distillation.csv"


@dataclass
class ChildModel:
    variant: str
    kind: ChildKind
    distilled: bool
    params: Parameters
    checkpoint: Path | None


def variant_name(kind: ChildKind, distilled: bool) -> str:
    return f"{kind}+distill" if distilled else str(kind)


def bleu_grid(
    model: Parameters,
    test: Sequence[SentencePair],
    vocab: Vocabulary,
    mode: DecodeMode,
    cfg: BeamConfig,
) -> list[float]:
    """Corpus BLEU at every combination, in grid order."""
    mc = model.config
    sources = [vocab.encode(p.source) for p in test]
    references = [p.target for p in test]
    return [
        evaluate_records(
            decode_and_log(model, combo, sources, vocab, mode, cfg), references
        ).bleu
        for combo in all_combinations(mc.enc_layers, mc.dec_layers)
    ]


def greedy_beam_grid(
    child: ChildModel, test: Sequence[SentencePair], vocab: Vocabulary, cfg: BeamConfig
) -> GreedyBeamGrid:
    greedy = bleu_grid(child.params, test, vocab, DecodeMode.GREEDY, cfg)
    beam = bleu_grid(child.params, test, vocab, DecodeMode.BEAM, cfg)
    return GreedyBeamGrid(
        variant=child.variant,
        child=str(child.kind),
        distilled=child.distilled,
        greedy_bleu=greedy,
        beam_bleu=beam,
        gap=[g - b for g, b in zip(greedy, beam, strict=True)],
    )


def train_child(
    kind: ChildKind,
    distilled: bool,
    pairs: Sequence[EncodedPair],
    parent: Parameters,
    config: TrainingConfig,
    out_dir: Path,
) -> ChildModel:
    """A tied-multi child with the parent's shape; tied-rs shares one layer per stack."""
    child_config = parent.config.model_copy(
        update={"recurrent_stacking": kind == ChildKind.TIED_RS}
    )
    name = variant_name(kind, distilled)
    run = train(ModelKind.TIED_MULTI, pairs, config, child_config, out_dir / name)
    params = load_checkpoint(run.averaged_path) if run.averaged_path else run.params
    return ChildModel(
        variant=name, kind=kind, distilled=distilled, params=params, checkpoint=run.averaged_path
    )


def distillation_table(report: DistillationReport) -> ReportTable:
    table = ReportTable(
        title="Greedy and beam BLEU per child",
        headers=["variant", "n", "m", "greedy_bleu", "beam_bleu", "gap"],
    )
    combos = list(all_combinations(report.enc_layers, report.dec_layers))
    for v in report.variants:
        for combo, g, b, gap in zip(combos, v.greedy_bleu, v.beam_bleu, v.gap, strict=True):
            table.add_row(v.variant, combo.n, combo.m, f"{g:.2f}", f"{b:.2f}", f"{gap:.2f}")
    return table


def run_distillation_pipeline(
    parent: Parameters,
    corpus: Sequence[EncodedPair],
    test: Sequence[SentencePair],
    vocab: Vocabulary,
    children: Sequence[ChildKind],
    config: TrainingConfig,
    beam: BeamConfig,
    out_dir: Path,
    distill: bool = True,
    workers: int = 1,
) -> DistillationReport:
    """
    Train every child kind on the original corpus and, with `distill`, on the
    parent's beam translations of it; compare greedy and beam quality.

    Without `distill` this is plain tied-multi training of each child kind.
    """
    pseudo = PseudoParallelCorpus()
    if distill:
        pseudo = generate_distillation_corpus(
            parent, [src for src, _ in corpus], beam, workers=workers
        )
        write_corpus(
            out_dir / PSEUDO_CORPUS,
            [SentencePair(vocab.decode(src), vocab.decode(tgt)) for src, tgt in pseudo.pairs],
        )

    trained: list[ChildModel] = []
    for kind in children:
        logger.info(f"Training {kind} child on the original corpus")
        trained.append(train_child(kind, False, corpus, parent, config, out_dir))
        if distill:
            logger.info(f"Training {kind} child on the distilled corpus")
            trained.append(train_child(kind, True, pseudo.pairs, parent, config, out_dir))

    report = DistillationReport(
        enc_layers=parent.config.enc_layers,
        dec_layers=parent.config.dec_layers,
        corpus_pairs=len(corpus),
        pseudo_pairs=len(pseudo),
        skipped=len(pseudo.skipped),
        variants=[greedy_beam_grid(child, test, vocab, beam) for child in trained],
    )
    write_json(out_dir / REPORT_JSON, report)
    table = distillation_table(report)
    write_text(out_dir / REPORT_TEXT, [table])
    write_csv(out_dir / REPORT_CSV, table)
    return report
