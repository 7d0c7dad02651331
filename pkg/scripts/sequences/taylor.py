"""
Taylor coefficient sequences and their Hadamard product.

The Hadamard product multiplies power series coefficientwise; its identity
is (1-z)^-1, whose coefficients are all 1.
"""

import csv
import math
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from workbench.errors import ConfigError
from weights import dsl
from sequences.element import SeqElement


def hadamard_mul(f: np.ndarray, g: np.ndarray, n: int = None) -> np.ndarray:
    """Coefficientwise product of two coefficient sequences, cut to n terms."""
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    n = min(f.size, g.size) if n is None else int(n)
    if n < 1:
        raise ValueError("need at least one coefficient")
    if f.size < n or g.size < n:
        raise ValueError(f"sequences shorter than n = {n}")
    return f[:n] * g[:n]


def exp_coeffs(n: int) -> np.ndarray:
    """Coefficients 1/m! of exp(z), m = 0..n-1."""
    return np.array([math.exp(-math.lgamma(m + 1)) for m in range(n)], dtype=complex)


def geometric_coeffs(n: int) -> np.ndarray:
    """Coefficients of (1-z)^-1."""
    return np.ones(n, dtype=complex)


def index_coeffs(n: int) -> np.ndarray:
    """Coefficients m of z/(1-z)^2."""
    return np.arange(n, dtype=float).astype(complex)


def polynomial_coeffs(coefficients: Iterable[complex], n: int) -> np.ndarray:
    """A polynomial's coefficients padded with zeros to n terms."""
    values = np.asarray(list(coefficients), dtype=complex)
    if values.size > n:
        raise ValueError(f"polynomial of degree {values.size - 1} needs n > {values.size - 1}")
    out = np.zeros(n, dtype=complex)
    out[:values.size] = values
    return out


def as_element(coefficients: np.ndarray, tail_rule: str = None, name: str = "") -> SeqElement:
    """
    Coefficients a_0, a_1, ... as the element x_i = a_{i-1} on the naturals.

    Raises:
        WeightExprError: tail rule fails to parse
    """
    tail = None if tail_rule is None else dsl.parse_weight_expr(tail_rule, ("i",))
    return SeqElement.from_coeffs(coefficients, tail, name=name)


def write_coefficients_csv(path: Union[str, Path], coefficients: np.ndarray):
    """Write rows (index, re, im), index starting at 0."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "re", "im"])
        for index, value in enumerate(np.asarray(coefficients, dtype=complex)):
            writer.writerow([index, repr(float(value.real)), repr(float(value.imag))])


def read_coefficients_csv(path: Union[str, Path]) -> np.ndarray:
    """
    Read rows written by write_coefficients_csv.

    Raises:
        ConfigError: missing columns or gaps in the index column
    """
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or not {"index", "re", "im"} <= set(reader.fieldnames):
            raise ConfigError(f"{path}: expected columns index, re, im")
        rows = [(int(row["index"]), complex(float(row["re"]), float(row["im"]))) for row in reader]
    rows.sort()
    if [index for index, _ in rows] != list(range(len(rows))):
        raise ConfigError(f"{path}: indices must run 0..{len(rows) - 1} without gaps")
    return np.array([value for _, value in rows], dtype=complex)
