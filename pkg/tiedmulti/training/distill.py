"""Pseudo-parallel corpora decoded by a trained parent model."""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from tiedmulti.config.experiment import BeamConfig
from tiedmulti.core.kinds import SpecialToken
from tiedmulti.core.models import LayerCombination
from tiedmulti.decoding.search import beam_decode
from tiedmulti.model.transformer import Parameters
from tiedmulti.training.batching import EncodedPair
from tiedmulti.utils.exceptions import TiedMultiError
from tiedmulti.utils.logger import logger


@dataclass
class PseudoParallelCorpus:
    """Sources paired with the parent's beam translations, in input order."""

    pairs: list[EncodedPair] = field(default_factory=list)
    sentence_ids: list[int] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.pairs)


def strip_eos(tokens: Sequence[int]) -> list[int]:
    out = list(tokens)
    if out and out[-1] == SpecialToken.EOS:
        out.pop()
    return out


def generate_distillation_corpus(
    parent: Parameters,
    sources: Sequence[Sequence[int]],
    cfg: BeamConfig,
    workers: int = 1,
) -> PseudoParallelCorpus:
    """
    Beam-decode every source sentence with the full (N, M) parent.

    Args:
        parent: Trained parent weights (read only)
        sources: Source token ids, one list per sentence
        cfg: Beam settings used for the parent translations
        workers: Sentences decoded in parallel

    Returns:
        Pairs in input order; sentences whose decode failed are listed in `skipped`.
        Translations are capped one token short of the parent horizon.
    """
    full = LayerCombination(n=parent.config.enc_layers, m=parent.config.dec_layers)
    # A child target plus its begin marker must fit the positional horizon.
    cfg = cfg.model_copy(update={"max_len": min(cfg.max_len, parent.config.max_len - 1)})

    def translate(src: Sequence[int]) -> list[int] | str:
        try:
            return strip_eos(beam_decode(parent, full, src, cfg))
        except TiedMultiError as e:
            return str(e)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(translate, sources))

    corpus = PseudoParallelCorpus()
    for sentence_id, (src, result) in enumerate(zip(sources, results, strict=True)):
        if isinstance(result, str):
            logger.warning(f"Skipping sentence {sentence_id} in distillation corpus: {result}")
            corpus.skipped.append(sentence_id)
            continue
        corpus.pairs.append((list(src), result))
        corpus.sentence_ids.append(sentence_id)
    logger.info(
        f"Distillation corpus: {len(corpus)} pairs from {len(sources)} sentences "
        f"({len(corpus.skipped)} skipped)"
    )
    return corpus
