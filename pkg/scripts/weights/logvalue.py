"""
Extended-real logarithmic scalars.

Weights and seminorm magnitudes are carried as natural logarithms so that
values such as 2^((k*j)^i) never overflow. Arrays use the same encoding as
the scalar type: -inf is the value 0, +inf is the value +inf.

Conventions: a/0 = +inf for every a >= 0 (0/0 included), inf/inf = +inf,
0*inf = 0.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering
from typing import Any, Dict

import numpy as np

NEG_INF = float("-inf")
POS_INF = float("inf")


class LogTag(str, Enum):
    FINITE = "finite"
    NEG_INFINITY = "neg_infinity"
    POS_INFINITY = "pos_infinity"


@total_ordering
@dataclass(frozen=True)
class LogValue:
    """A nonnegative extended real stored by its natural logarithm."""

    tag: LogTag
    log_magnitude: float = 0.0

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(LogTag.NEG_INFINITY)

    @classmethod
    def infinity(cls) -> "LogValue":
        return cls(LogTag.POS_INFINITY)

    @classmethod
    def from_log(cls, log_magnitude: float) -> "LogValue":
        log_magnitude = float(log_magnitude)
        if math.isnan(log_magnitude):
            raise ValueError("log magnitude is NaN")
        if log_magnitude == NEG_INF:
            return cls.zero()
        if log_magnitude == POS_INF:
            return cls.infinity()
        return cls(LogTag.FINITE, log_magnitude)

    @classmethod
    def from_value(cls, value: float) -> "LogValue":
        value = float(value)
        if value < 0 or math.isnan(value):
            raise ValueError(f"LogValue needs a nonnegative value, got {value}")
        if value == 0:
            return cls.zero()
        if value == POS_INF:
            return cls.infinity()
        return cls(LogTag.FINITE, math.log(value))

    @property
    def log(self) -> float:
        if self.tag == LogTag.NEG_INFINITY:
            return NEG_INF
        if self.tag == LogTag.POS_INFINITY:
            return POS_INF
        return self.log_magnitude

    @property
    def is_zero(self) -> bool:
        return self.tag == LogTag.NEG_INFINITY

    @property
    def is_infinite(self) -> bool:
        return self.tag == LogTag.POS_INFINITY

    def to_float(self) -> float:
        try:
            return math.exp(self.log)
        except OverflowError:
            return POS_INF

    def __mul__(self, other: "LogValue") -> "LogValue":
        return LogValue.from_log(float(log_mul(self.log, other.log)))

    def __truediv__(self, other: "LogValue") -> "LogValue":
        return LogValue.from_log(float(log_div(self.log, other.log)))

    def __add__(self, other: "LogValue") -> "LogValue":
        return LogValue.from_log(float(np.logaddexp(self.log, other.log)))

    def __lt__(self, other: "LogValue") -> bool:
        return self.log < other.log

    def to_dict(self) -> Dict[str, Any]:
        if self.tag == LogTag.FINITE:
            return {"tag": self.tag.value, "log": self.log_magnitude}
        return {"tag": self.tag.value}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LogValue":
        tag = LogTag(data["tag"])
        if tag == LogTag.FINITE:
            return cls(tag, float(data["log"]))
        return cls(tag)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        if self.is_infinite:
            return "inf"
        return f"exp({self.log_magnitude:.6g})"


def log_mul(a, b):
    """Log of a product; 0 * inf = 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a + b
    zero = (a == NEG_INF) | (b == NEG_INF)
    return np.where(zero, NEG_INF, out)


def log_div(a, b):
    """Log of a quotient with a/0 = +inf and inf/inf = +inf."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a - b
    out = np.where(np.isnan(out), POS_INF, out)
    out = np.where(b == NEG_INF, POS_INF, out)
    return np.where((a == NEG_INF) & (b != NEG_INF), NEG_INF, out)


def tree_logsumexp(log_terms) -> float:
    """
    Log of a sum by pairwise reduction.

    The reduction tree depends only on the number of terms, so results are
    bit-stable across runs and chunkings of the same prefix.
    """
    values = np.asarray(log_terms, dtype=float).ravel()
    if values.size == 0:
        return NEG_INF
    while values.size > 1:
        if values.size % 2:
            values = np.append(values, NEG_INF)
        values = np.logaddexp(values[0::2], values[1::2])
    return float(values[0])


def log_max(log_terms) -> float:
    """Log of a supremum over a (possibly empty) prefix."""
    values = np.asarray(log_terms, dtype=float)
    if values.size == 0:
        return NEG_INF
    return float(np.max(values))
