"""
Countable index sets and their fixed enumerations.

Truncation depth always means "the first N enumerated indices". Pairs are
enumerated in Cantor order: ascending i + j, then ascending i.
"""

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from workbench.errors import ConfigError

Index = Union[int, Tuple[int, int]]


class IndexKind(str, Enum):
    NATURALS = "naturals"
    NATURAL_PAIRS = "natural_pairs"
    FINITE = "finite"


@dataclass(frozen=True)
class IndexSet:
    kind: IndexKind
    size: Optional[int] = None

    def __post_init__(self):
        if self.kind == IndexKind.FINITE:
            if self.size is None or self.size < 1:
                raise ConfigError("finite index sets need size >= 1")
        elif self.size is not None:
            raise ConfigError(f"{self.kind.value} index set takes no size")

    @classmethod
    def naturals(cls) -> "IndexSet":
        return cls(IndexKind.NATURALS)

    @classmethod
    def pairs(cls) -> "IndexSet":
        return cls(IndexKind.NATURAL_PAIRS)

    @classmethod
    def finite(cls, n: int) -> "IndexSet":
        return cls(IndexKind.FINITE, int(n))

    @classmethod
    def parse(cls, spec: Any) -> "IndexSet":
        """Accept "naturals", "natural_pairs", "finite(64)" or the dict form."""
        if isinstance(spec, IndexSet):
            return spec
        if isinstance(spec, dict):
            kind = spec.get("kind")
            if kind == IndexKind.FINITE.value:
                return cls.finite(spec.get("size", 0))
            spec = kind
        if spec == IndexKind.NATURALS.value:
            return cls.naturals()
        if spec == IndexKind.NATURAL_PAIRS.value:
            return cls.pairs()
        match = re.fullmatch(r"finite\((\d+)\)", str(spec).strip())
        if match:
            return cls.finite(int(match.group(1)))
        raise ConfigError(f"unknown index set: {spec!r}")

    @property
    def is_finite(self) -> bool:
        return self.kind == IndexKind.FINITE

    @property
    def variables(self) -> Tuple[str, ...]:
        return ("i", "j") if self.kind == IndexKind.NATURAL_PAIRS else ("i",)

    def clamp(self, depth: int) -> int:
        """Effective prefix length for a requested depth."""
        depth = int(depth)
        if depth < 1:
            raise ValueError("depth must be >= 1")
        return min(depth, self.size) if self.is_finite else depth

    def covers(self, depth: int) -> bool:
        """True when a prefix of this depth enumerates the whole set."""
        return self.is_finite and depth >= self.size

    def enumerate(self, depth: int) -> np.ndarray:
        """Indices of the first `depth` ranks: shape (n,) or (n, 2)."""
        return _enumerate(self, self.clamp(depth))

    def coordinates(self, depth: int) -> Dict[str, np.ndarray]:
        """Float coordinate arrays keyed by DSL variable name."""
        return _coordinates(self, self.clamp(depth))

    def index_at(self, rank: int) -> Index:
        if rank < 1 or (self.is_finite and rank > self.size):
            raise ValueError(f"rank {rank} outside {self.label()}")
        if self.kind == IndexKind.NATURAL_PAIRS:
            i, j = cantor_pair(np.array([rank], dtype=np.int64))
            return int(i[0]), int(j[0])
        return int(rank)

    def rank_of(self, index: Index) -> int:
        if self.kind == IndexKind.NATURAL_PAIRS:
            i, j = index
            if i < 1 or j < 1:
                raise ValueError(f"pair {index} outside natural_pairs")
            s = i + j
            return (s - 2) * (s - 1) // 2 + i
        rank = int(index)
        if rank < 1 or (self.is_finite and rank > self.size):
            raise ValueError(f"index {index} outside {self.label()}")
        return rank

    def coordinates_of(self, index: Index) -> Dict[str, np.ndarray]:
        if self.kind == IndexKind.NATURAL_PAIRS:
            i, j = index
            return {"i": np.array([float(i)]), "j": np.array([float(j)])}
        self.rank_of(index)
        return {"i": np.array([float(index)])}

    def label(self, index: Optional[Index] = None) -> str:
        if index is not None:
            return str(tuple(index)) if isinstance(index, tuple) else str(index)
        if self.is_finite:
            return f"finite({self.size})"
        return self.kind.value

    def to_dict(self) -> Dict[str, Any]:
        if self.is_finite:
            return {"kind": self.kind.value, "size": self.size}
        return {"kind": self.kind.value}


def cantor_pair(ranks: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized inverse of the Cantor enumeration (ranks start at 1)."""
    ranks = np.asarray(ranks, dtype=np.int64)
    s = np.ceil((1.0 + np.sqrt(1.0 + 8.0 * ranks)) / 2.0).astype(np.int64)
    # correct floating-point sqrt at the diagonal boundaries
    s = np.where((s - 2) * (s - 1) // 2 >= ranks, s - 1, s)
    s = np.where((s - 1) * s // 2 < ranks, s + 1, s)
    i = ranks - (s - 2) * (s - 1) // 2
    return i, s - i


@lru_cache(maxsize=64)
def _enumerate(index_set: IndexSet, depth: int) -> np.ndarray:
    ranks = np.arange(1, depth + 1, dtype=np.int64)
    if index_set.kind == IndexKind.NATURAL_PAIRS:
        i, j = cantor_pair(ranks)
        out = np.stack([i, j], axis=1)
    else:
        out = ranks
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def _coordinates(index_set: IndexSet, depth: int) -> Dict[str, np.ndarray]:
    indices = _enumerate(index_set, depth)
    if index_set.kind == IndexKind.NATURAL_PAIRS:
        coords = {"i": indices[:, 0].astype(float), "j": indices[:, 1].astype(float)}
    else:
        coords = {"i": indices.astype(float)}
    for array in coords.values():
        array.setflags(write=False)
    return coords
