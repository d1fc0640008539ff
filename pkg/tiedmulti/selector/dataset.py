"""Multi-label training data for the combination classifier, and its file format.

    # N=3<TAB>M=3<TAB>order=n-major,m-fastest
    a b c<TAB>0 0 1 0 0 1 0 0 0
"""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from tiedmulti.adapters.text.vocabulary import Vocabulary
from tiedmulti.config.experiment import BeamConfig
from tiedmulti.core.kinds import DecodeMode
from tiedmulti.core.models import MultiLabelExample, SentencePair, all_combinations
from tiedmulti.decoding.timed import decode_one
from tiedmulti.metrics.chrf import sentence_chrf
from tiedmulti.metrics.gridfile import ORDER_TAG
from tiedmulti.metrics.oracle import CombinationGrid, oracle_label_set
from tiedmulti.model.transformer import Parameters
from tiedmulti.utils.exceptions import CorpusError, TiedMultiError
from tiedmulti.utils.logger import logger


@dataclass
class SelectorDataset:
    """Examples plus the score grids they were labelled from."""

    enc_layers: int
    dec_layers: int
    examples: list[MultiLabelExample] = field(default_factory=list)
    grids: list[tuple[int, CombinationGrid]] = field(default_factory=list)
    failures: int = 0

    @property
    def classes(self) -> int:
        return self.enc_layers * self.dec_layers

    def label_matrix(self) -> NDArray[np.float64]:
        return np.asarray([ex.labels for ex in self.examples], dtype=np.float64)

    def label_counts(self) -> NDArray[np.int64]:
        return self.label_matrix().sum(axis=0).astype(np.int64)


def score_grid(
    model: Parameters,
    src: Sequence[int],
    reference: str,
    vocab: Vocabulary,
    cfg: BeamConfig,
    mode: DecodeMode = DecodeMode.BEAM,
) -> CombinationGrid:
    """Sentence chrF of the translation at every combination."""
    mc = model.config
    scores = [
        sentence_chrf(vocab.decode(decode_one(model, combo, src, mode, cfg)), reference)
        for combo in all_combinations(mc.enc_layers, mc.dec_layers)
    ]
    return CombinationGrid(np.asarray(scores), mc.enc_layers, mc.dec_layers)


def build_selector_dataset(
    model: Parameters,
    corpus: Sequence[SentencePair],
    vocab: Vocabulary,
    cfg: BeamConfig,
    mode: DecodeMode = DecodeMode.BEAM,
    workers: int = 1,
) -> SelectorDataset:
    """
    Decode each sentence at all K combinations and label every chrF-maximal one.

    Sentences whose source cannot be encoded or decoded are left out and
    counted in `failures`.
    """
    mc = model.config

    def label(pair: SentencePair) -> CombinationGrid | str:
        try:
            return score_grid(model, vocab.encode(pair.source), pair.target, vocab, cfg, mode)
        except TiedMultiError as e:
            return str(e)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(label, corpus))

    dataset = SelectorDataset(enc_layers=mc.enc_layers, dec_layers=mc.dec_layers)
    for sentence_id, (pair, result) in enumerate(zip(corpus, results, strict=True)):
        if isinstance(result, str):
            logger.warning(f"Leaving sentence {sentence_id} out of the selector data: {result}")
            dataset.failures += 1
            continue
        oracle = oracle_label_set(result)
        dataset.grids.append((sentence_id, result))
        dataset.examples.append(
            MultiLabelExample(
                tokens=vocab.encode(pair.source),
                labels=oracle.label_vector(),
                text=pair.source,
            )
        )
    logger.info(
        f"Selector data: {len(dataset.examples)} examples, {dataset.failures} failures"
    )
    return dataset


def write_selector_dataset(path: Path, dataset: SelectorDataset) -> Path:
    lines = [f"# N={dataset.enc_layers}\tM={dataset.dec_layers}\t{ORDER_TAG}"]
    for ex in dataset.examples:
        lines.append(f"{ex.text}\t{' '.join(str(v) for v in ex.labels)}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _depth(cell: str, key: str) -> int:
    name, _, value = cell.partition("=")
    if name != key or not value.isdigit():
        raise CorpusError(f"selector data header: expected {key}=<int>, got {cell!r}")
    return int(value)


def read_selector_dataset(path: Path, vocab: Vocabulary) -> SelectorDataset:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise CorpusError(f"cannot read selector data {path}: {e}") from e
    if not lines or not lines[0].startswith("#"):
        raise CorpusError(f"{path}: missing selector data header")
    header = lines[0].lstrip("# ").split("\t")
    if len(header) != 3 or header[2] != ORDER_TAG:
        raise CorpusError(f"{path}: unrecognised header {lines[0]!r}")
    dataset = SelectorDataset(
        enc_layers=_depth(header[0], "N"), dec_layers=_depth(header[1], "M")
    )
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        text, sep, labels_cell = line.rpartition("\t")
        labels = labels_cell.split()
        if not sep or len(labels) != dataset.classes or set(labels) - {"0", "1"}:
            raise CorpusError(f"{path}:{lineno}: expected text<TAB>{dataset.classes} 0/1 labels")
        try:
            example = MultiLabelExample(
                tokens=vocab.encode(text), labels=[int(v) for v in labels], text=text
            )
        except ValueError as e:
            raise CorpusError(f"{path}:{lineno}: {e}") from e
        dataset.examples.append(example)
    return dataset
