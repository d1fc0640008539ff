"""Parallel corpus files: UTF-8, one `source<TAB>target` pair per line."""

from collections.abc import Sequence
from pathlib import Path

from tiedmulti.adapters.text.vocabulary import Vocabulary
from tiedmulti.core.models import SentencePair
from tiedmulti.training.batching import EncodedPair
from tiedmulti.utils.exceptions import CorpusError


def read_corpus(path: Path) -> list[SentencePair]:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise CorpusError(f"cannot read corpus {path}: {e}") from e
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) != 2:
            raise CorpusError(f"{path}:{lineno}: expected source<TAB>target")
        pairs.append(SentencePair(source=cells[0].strip(), target=cells[1].strip()))
    return pairs


def write_corpus(path: Path, pairs: Sequence[SentencePair]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for pair in pairs:
            f.write(f"{pair.source}\t{pair.target}\n")
    return path


def encode_pairs(pairs: Sequence[SentencePair], vocab: Vocabulary) -> list[EncodedPair]:
    return [(vocab.encode(p.source), vocab.encode(p.target)) for p in pairs]


def encode_sources(pairs: Sequence[SentencePair], vocab: Vocabulary) -> list[list[int]]:
    return [vocab.encode(p.source) for p in pairs]
