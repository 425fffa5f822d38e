"""Restricted isometry diagnostics by exhaustive support enumeration.

The order-k isometry constant of a measurement matrix is the smallest
``delta`` with ``(1-delta)|x|^2 <= |Ax|^2 <= (1+delta)|x|^2`` for every
k-sparse ``x``; equivalently the worst eigenvalue deviation from 1 over all
k-column Gram matrices.  These routines compute it exactly by enumerating
supports, which is only feasible for small sizes but gives ground truth the
sampling-based experiments can be held against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DimensionError, EnumerationTooLargeError
from .linalg import gram_on_support, sym_eigen_extremes

__all__ = [
    "RipEstimate",
    "delta2_coherence",
    "delta_k_bruteforce",
    "min_measurements_heuristic",
    "recovery_condition",
]


@dataclass(frozen=True)
class RipEstimate:
    """Exact order-k isometry constant with the support attaining it."""

    order: int
    delta: float
    worst_support: tuple
    supports_checked: int


def delta_k_bruteforce(matrix, order: int, max_supports: int = 1_000_000) -> RipEstimate:
    """Order-k isometry constant over every size-k column support.

    Each support's Gram matrix is reduced by the in-package Jacobi
    eigensolver; enumeration refuses to start above ``max_supports``
    supports.
    """
    entries = getattr(matrix, "entries", None)
    dimension = entries.shape[1] if entries is not None else np.asarray(matrix).shape[1]
    if not 1 <= order <= dimension:
        raise DimensionError(
            f"need 1 <= order <= dimension, got {order}, {dimension}"
        )
    total = math.comb(dimension, order)
    if total > max_supports:
        raise EnumerationTooLargeError(
            f"{total} supports of size {order} from {dimension} columns; "
            f"the cap is {max_supports}"
        )
    worst = -math.inf
    worst_support = None
    for support in combinations(range(dimension), order):
        g = gram_on_support(matrix, np.array(support, dtype=np.int64))
        lo, hi = sym_eigen_extremes(g)
        dev = max(hi - 1.0, 1.0 - lo)
        if dev > worst:
            worst = dev
            worst_support = support
    return RipEstimate(
        order=order,
        delta=max(worst, 0.0),
        worst_support=worst_support,
        supports_checked=total,
    )


def delta2_coherence(matrix) -> float:
    """Order-2 isometry constant as the worst off-diagonal Gram entry.

    For a sign ensemble the columns have exactly unit norm, each pair Gram is
    ``[[1, g], [g, 1]]`` with eigenvalues ``1 +- g``, and the order-2
    constant equals the coherence ``max |g|``.  Computed with integer sign
    dot products and a single division, so the value is a correctly rounded
    rational.
    """
    signs = getattr(matrix, "signs", None)
    if signs is None:
        raise DimensionError(
            "coherence shortcut requires a sign ensemble with exact unit columns"
        )
    if signs.shape[1] < 2:
        raise DimensionError("need at least 2 columns")
    dots = signs.T.astype(np.int64) @ signs.astype(np.int64)
    np.fill_diagonal(dots, 0)
    return float(np.abs(dots).max()) / signs.shape[0]


def recovery_condition(delta2k: float) -> bool:
    """Whether an order-2k constant certifies exact sparse recovery.

    True exactly when ``delta2k < sqrt(2) - 1``.
    """
    if delta2k < 0.0:
        raise ValueError(f"isometry constant cannot be negative, got {delta2k}")
    return delta2k < math.sqrt(2.0) - 1.0


def min_measurements_heuristic(sparsity: int, dimension: int, delta: float) -> int:
    """Heuristic row count ``ceil(k * ln(N/k) / delta)`` for a target constant."""
    if not 1 <= sparsity < dimension:
        raise DimensionError(
            f"need 1 <= sparsity < dimension, got {sparsity}, {dimension}"
        )
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    return math.ceil(sparsity * math.log(dimension / sparsity) / delta)
