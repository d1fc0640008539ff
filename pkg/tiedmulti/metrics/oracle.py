"""Speed order over layer combinations, oracle selection and oracle histograms."""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from tiedmulti.core.models import LayerCombination, all_combinations
from tiedmulti.utils.exceptions import CombinationError, CorpusError


def speed_key(combo: LayerCombination) -> tuple[int, int]:
    """Sort key of the speed order: decoder depth first, encoder depth breaks ties."""
    return combo.m, combo.n


def is_faster(c1: LayerCombination, c2: LayerCombination) -> bool:
    """True iff m1 < m2, or m1 == m2 and n1 < n2."""
    return speed_key(c1) < speed_key(c2)


def fastest(combos: Iterable[LayerCombination]) -> LayerCombination:
    return min(combos, key=speed_key)


@dataclass
class CombinationGrid:
    """K = N x M values, row-major by encoder depth with m varying fastest."""

    values: NDArray[np.float64]
    enc_layers: int
    dec_layers: int

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        K = self.enc_layers * self.dec_layers
        if self.values.shape != (K,):
            raise CorpusError(f"grid has {self.values.size} values, expected {K}")
        if not np.all(np.isfinite(self.values)):
            raise CorpusError("grid values must be finite")

    @property
    def size(self) -> int:
        return self.enc_layers * self.dec_layers

    def at(self, combo: LayerCombination) -> float:
        combo.check(self.enc_layers, self.dec_layers)
        return float(self.values[combo.index(self.dec_layers)])

    def combinations(self) -> list[LayerCombination]:
        return list(all_combinations(self.enc_layers, self.dec_layers))


@dataclass
class OracleLabel:
    """All combinations reaching the grid maximum and the fastest of them."""

    best: frozenset[LayerCombination]
    fastest_best: LayerCombination
    enc_layers: int = field(default=0)
    dec_layers: int = field(default=0)

    def __post_init__(self) -> None:
        if not self.best or self.fastest_best not in self.best:
            raise CombinationError("an oracle label needs a non-empty best set containing its pick")

    def label_vector(self) -> list[int]:
        """K-dimensional 0/1 vector in grid order."""
        return [
            int(c in self.best) for c in all_combinations(self.enc_layers, self.dec_layers)
        ]


def oracle_label_set(grid: CombinationGrid) -> OracleLabel:
    """Exact-value argmax set; no tolerance is applied."""
    peak = grid.values.max()
    best = frozenset(c for c, v in zip(grid.combinations(), grid.values, strict=True) if v == peak)
    return OracleLabel(
        best=best,
        fastest_best=fastest(best),
        enc_layers=grid.enc_layers,
        dec_layers=grid.dec_layers,
    )


def oracle_combination(grid: CombinationGrid) -> LayerCombination:
    """Among the argmax entries, the one that is fastest in the speed order."""
    return oracle_label_set(grid).fastest_best


def oracle_distribution(
    labels: Sequence[OracleLabel], enc_layers: int, dec_layers: int
) -> NDArray[np.int64]:
    """Count of `fastest_best` per combination, in grid order."""
    hist = np.zeros(enc_layers * dec_layers, dtype=np.int64)
    for label in labels:
        label.fastest_best.check(enc_layers, dec_layers)
        hist[label.fastest_best.index(dec_layers)] += 1
    return hist
