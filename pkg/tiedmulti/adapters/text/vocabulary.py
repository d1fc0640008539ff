"""Closed whitespace-token vocabulary shared by source and target."""

import string
from collections.abc import Iterable, Sequence
from pathlib import Path

from tiedmulti.core.kinds import SpecialToken
from tiedmulti.utils.exceptions import CorpusError, VocabularyError

SPECIALS = ("<pad>", "<s>", "</s>", "<cls>")


def symbol_names(count: int) -> list[str]:
    """a..z, then s26, s27, ..."""
    letters = list(string.ascii_lowercase)
    return letters[:count] + [f"s{k}" for k in range(len(letters), count)]


class Vocabulary:
    """Reserved ids 0 pad, 1 begin, 2 end, 3 classification, then the symbols in order."""

    def __init__(self, symbols: Sequence[str]) -> None:
        if len(set(symbols)) != len(symbols):
            raise VocabularyError("vocabulary symbols must be unique")
        clash = set(symbols) & set(SPECIALS)
        if clash:
            raise VocabularyError(f"reserved tokens used as symbols: {sorted(clash)}")
        if any(not s or any(c.isspace() for c in s) for s in symbols):
            raise VocabularyError("symbols must be non-empty and free of whitespace")
        self.symbols = list(symbols)
        self._ids = {s: k + len(SPECIALS) for k, s in enumerate(self.symbols)}

    @classmethod
    def for_symbols(cls, count: int) -> "Vocabulary":
        return cls(symbol_names(count))

    @property
    def size(self) -> int:
        return len(SPECIALS) + len(self.symbols)

    def __len__(self) -> int:
        return self.size

    def encode(self, text: str) -> list[int]:
        ids = []
        for token in text.split():
            if token not in self._ids:
                raise VocabularyError(f"unknown symbol {token!r}")
            ids.append(self._ids[token])
        return ids

    def decode(self, ids: Iterable[int]) -> str:
        """Symbols up to the first end token; other reserved ids are dropped."""
        out = []
        for i in ids:
            if i == SpecialToken.EOS:
                break
            if i < len(SPECIALS):
                continue
            if i >= self.size:
                raise VocabularyError(f"token id {i} outside vocabulary of {self.size}")
            out.append(self.symbols[i - len(SPECIALS)])
        return " ".join(out)

    def save(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.symbols) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Path) -> "Vocabulary":
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise CorpusError(f"cannot read vocabulary {path}: {e}") from e
        return cls([line.strip() for line in lines if line.strip()])
