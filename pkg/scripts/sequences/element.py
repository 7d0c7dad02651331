"""
Truncated elements of λ(P).

Coefficients are stored as log-magnitudes plus phases so that witnesses
with astronomically large entries stay exact; `coeffs` converts back to
complex numbers when they fit.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Optional

import numpy as np

from workbench.errors import ConfigError
from weights import dsl
from weights.dsl import WeightExpr
from weights.index_set import IndexSet

logger = logging.getLogger(__name__)


def _frozen(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SeqElement:
    """x_1, ..., x_N on an enumerated prefix, optionally with |x_i| beyond N."""

    log_abs: np.ndarray
    phase: np.ndarray
    tail_rule: Optional[WeightExpr] = None
    index_set: IndexSet = field(default_factory=IndexSet.naturals)
    name: str = ""

    def __post_init__(self):
        log_abs = np.ravel(np.asarray(self.log_abs, dtype=float))
        phase = np.ravel(np.asarray(self.phase, dtype=float))
        if phase.size == 1 and log_abs.size != 1:
            phase = np.full(log_abs.shape, phase[0])
        if log_abs.shape != phase.shape:
            raise ConfigError("magnitudes and phases differ in length")
        if np.any(np.isnan(log_abs)) or np.any(np.isnan(phase)) or np.any(log_abs == np.inf):
            raise ConfigError("sequence coefficients must be finite")
        if self.index_set.is_finite and log_abs.size > self.index_set.size:
            raise ConfigError(f"{log_abs.size} coefficients exceed {self.index_set.label()}")
        # zero coefficients carry no phase
        phase = np.where(log_abs == -np.inf, 0.0, phase)
        object.__setattr__(self, "log_abs", _frozen(log_abs))
        object.__setattr__(self, "phase", _frozen(phase))

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_coeffs(cls, values: Iterable[complex], tail_rule: Optional[WeightExpr] = None,
                    index_set: Optional[IndexSet] = None, name: str = "") -> "SeqElement":
        values = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                            dtype=complex)
        if not np.all(np.isfinite(values)):
            raise ConfigError("sequence coefficients must be finite")
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(values))
        return cls(log_abs, np.angle(values), tail_rule, index_set or IndexSet.naturals(), name)

    @classmethod
    def from_rule(cls, text: str, n: int, index_set: Optional[IndexSet] = None,
                  with_tail: bool = True, name: str = "") -> "SeqElement":
        """
        Coefficients |x_i| given by a nonnegative DSL expression.

        Raises:
            WeightExprError: the expression fails to parse or is negative
        """
        index_set = index_set or IndexSet.naturals()
        expr = dsl.parse_weight_expr(text, index_set.variables)
        n = index_set.clamp(n)
        log_abs = dsl.evaluate_log(expr.root, index_set.coordinates(n))
        log_abs = np.broadcast_to(log_abs, (n,))
        return cls(log_abs, np.zeros(n), expr if with_tail else None, index_set, name or text)

    @classmethod
    def unit(cls, rank: int, n: int, index_set: Optional[IndexSet] = None) -> "SeqElement":
        """The unit vector e_rank, with an identically zero tail."""
        if not 1 <= rank <= n:
            raise ValueError(f"rank {rank} outside 1..{n}")
        log_abs = np.full(n, -np.inf)
        log_abs[rank - 1] = 0.0
        return cls(log_abs, np.zeros(n), dsl.parse_weight_expr("0"),
                   index_set or IndexSet.naturals(), f"e_{rank}")

    @classmethod
    def zeros(cls, n: int, index_set: Optional[IndexSet] = None) -> "SeqElement":
        return cls(np.full(n, -np.inf), np.zeros(n), dsl.parse_weight_expr("0"),
                   index_set or IndexSet.naturals(), "0")

    @classmethod
    def ones(cls, n: int, index_set: Optional[IndexSet] = None, with_tail: bool = True) -> "SeqElement":
        return cls.from_rule("1", n, index_set, with_tail, "1")

    # -- views -------------------------------------------------------------

    @property
    def n(self) -> int:
        return int(self.log_abs.size)

    @property
    def coeffs(self) -> np.ndarray:
        """Complex coefficients; entries too large for a float become inf."""
        with np.errstate(over="ignore"):
            magnitude = np.exp(self.log_abs)
        if np.any(np.isinf(magnitude)):
            logger.warning("Coefficients of %s overflow double precision", self.name or "sequence")
        return magnitude * np.exp(1j * self.phase)

    @property
    def is_zero(self) -> bool:
        zero_tail = self.tail_rule is None or self.tail_rule.is_zero
        return bool(np.all(self.log_abs == -np.inf)) and zero_tail

    @property
    def support(self) -> np.ndarray:
        """1-based ranks of the nonzero coefficients."""
        return np.flatnonzero(self.log_abs > -np.inf) + 1

    def truncate(self, n: int) -> "SeqElement":
        n = min(int(n), self.n)
        return SeqElement(self.log_abs[:n], self.phase[:n], self.tail_rule, self.index_set, self.name)

    def tail_log_abs(self, depth: int) -> Optional[np.ndarray]:
        """log |x_i| for ranks N+1..depth from the tail rule, if any."""
        if self.tail_rule is None:
            return None
        depth = self.index_set.clamp(depth)
        if depth <= self.n:
            return np.empty(0)
        coords = {name: values[self.n:] for name, values in self.index_set.coordinates(depth).items()}
        values = dsl.evaluate_log(self.tail_rule.root, coords)
        return np.broadcast_to(values, (depth - self.n,))

    def extended_log_abs(self, depth: int) -> np.ndarray:
        """Prefix magnitudes continued by the tail rule (zero when absent)."""
        tail = self.tail_log_abs(depth)
        if tail is None:
            tail = np.full(max(self.index_set.clamp(depth) - self.n, 0), -np.inf)
        return np.concatenate([self.log_abs[:depth], tail])

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        coeffs = self.coeffs
        data: Dict[str, Any] = {
            "N": self.n,
            "coeffs": [[float(c.real), float(c.imag)] for c in coeffs],
        }
        if self.tail_rule is not None:
            data["tail_rule"] = self.tail_rule.source
        if self.index_set != IndexSet.naturals():
            data["index_set"] = self.index_set.to_dict()
        if self.name:
            data["name"] = self.name
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SeqElement":
        """
        Raises:
            ConfigError: N disagrees with the coefficient list
        """
        index_set = IndexSet.parse(data.get("index_set", "naturals"))
        pairs = data.get("coeffs", [])
        values = np.array([complex(re, im) for re, im in pairs], dtype=complex)
        if "N" in data and int(data["N"]) != values.size:
            raise ConfigError(f"N = {data['N']} but {values.size} coefficients given")
        tail_rule = None
        if data.get("tail_rule") is not None:
            tail_rule = dsl.parse_weight_expr(data["tail_rule"], index_set.variables)
        return cls.from_coeffs(values, tail_rule, index_set, data.get("name", ""))


def pointwise_mul(x: SeqElement, y: SeqElement) -> SeqElement:
    """Coefficientwise product on the common prefix; tails multiply when both exist."""
    n = min(x.n, y.n)
    log_abs = np.asarray(x.log_abs[:n]) + np.asarray(y.log_abs[:n])
    log_abs = np.where((x.log_abs[:n] == -np.inf) | (y.log_abs[:n] == -np.inf), -np.inf, log_abs)
    phase = np.mod(x.phase[:n] + y.phase[:n] + np.pi, 2 * np.pi) - np.pi
    tail_rule = None
    if x.tail_rule is not None and y.tail_rule is not None:
        tail_rule = WeightExpr.from_node(dsl.mul(x.tail_rule.root, y.tail_rule.root))
    name = f"{x.name}*{y.name}" if x.name and y.name else ""
    return SeqElement(log_abs, phase, tail_rule, x.index_set, name)
