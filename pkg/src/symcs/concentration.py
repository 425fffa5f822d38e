"""Concentration diagnostics for partial symmetric sign projections.

For a fixed vector ``alpha`` in R^N and the full symmetric sign matrix ``M``,
the row statistics are ``Q_j = (M_j . alpha) / sqrt(N)`` and their energy is
``S = sum_{j < n} Q_j**2``.  When ``alpha`` is a unit vector, ``E Q_j**2`` is
exactly ``1/N``, so ``E S = n/N``, and the image of ``alpha`` under the
``n**-0.5``-scaled partial matrix has squared norm ``(N/n) * S`` with mean 1.

This module provides

* exact enumeration of ``E exp(h*S)`` over every symmetric sign matrix
  (small N) and of per-row moments over every sign row pattern, so claimed
  product factorizations and moment formulas can be checked by brute force
  rather than sampling
* the analytic per-row bound ``E exp(h*Q**2) <= (1 - 2h/N)**-0.5`` and the
  two-sided tail bound ``exp(-(n/2)*(eps**2/2 - eps**3/3))`` on the relative
  deviation of ``(N/n)*S`` from 1
* Monte Carlo tail frequency checks with fully derived per-trial seeds
* Johnson-Lindenstrauss style sizing of the row count for a point set, and a
  direct pairwise distortion audit of a projected point set
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ensembles import SymmetricSignMatrix, gen_symmetric_sign_matrix
from .errors import DimensionError, EnumerationTooLargeError
from .rng import Stream, derive_seed

_MAX_FREE_BITS = 20
_MAX_ROW_BITS = 16

__all__ = [
    "DistortionReport",
    "TailCheckReport",
    "empirical_tail",
    "empirical_tails",
    "jl_measurement_bound",
    "jl_min_measurements",
    "mgf_lhs_exact",
    "mgf_rhs_exact",
    "moment4_exact",
    "pairwise_distortion",
    "q_statistics",
    "random_unit_vector",
    "row_mgf_bound",
    "tail_bound",
]


def q_statistics(full: SymmetricSignMatrix, rows: int, alpha: np.ndarray):
    """Row statistics ``Q_1..Q_rows`` for ``alpha`` and their energy ``S``.

    Returns ``(values, total)`` where ``values[j] = (M_j . alpha)/sqrt(N)``
    and ``total = sum(values**2)``.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (full.dimension,):
        raise DimensionError(
            f"alpha shape {alpha.shape} does not match dimension {full.dimension}"
        )
    if not 1 <= rows <= full.dimension:
        raise DimensionError(
            f"need 1 <= rows <= dimension, got {rows}, {full.dimension}"
        )
    values = (full.signs[:rows].astype(np.float64) @ alpha) / math.sqrt(full.dimension)
    return values, float(values @ values)


def random_unit_vector(dimension: int, seed: int) -> np.ndarray:
    """Uniform random direction in R^dimension from a derived seed.

    Draws standard normals and normalizes; in the (measure-zero) event of an
    exactly zero draw the same stream simply continues with fresh normals.
    """
    if dimension < 1:
        raise DimensionError(f"dimension must be positive, got {dimension}")
    stream = Stream(seed)
    while True:
        v = stream.normals(dimension)
        norm = float(np.linalg.norm(v))
        if norm > 0.0:
            return v / norm


@lru_cache(maxsize=8)
def _symmetric_enumeration(dimension: int) -> np.ndarray:
    """All symmetric sign matrices of the given dimension, shape (count, N, N)."""
    free = dimension * (dimension + 1) // 2
    if free > _MAX_FREE_BITS:
        raise EnumerationTooLargeError(
            f"{2**free} symmetric sign matrices at dimension {dimension}; "
            f"the enumeration cap is 2**{_MAX_FREE_BITS}"
        )
    count = 1 << free
    codes = np.arange(count, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(free, dtype=np.int64)[None, :]) & 1
    vals = (2 * bits - 1).astype(np.int8)
    mats = np.zeros((count, dimension, dimension), dtype=np.int8)
    iu = np.triu_indices(dimension)
    mats[:, iu[0], iu[1]] = vals
    il = np.tril_indices(dimension, k=-1)
    mats[:, il[0], il[1]] = mats.transpose(0, 2, 1)[:, il[0], il[1]]
    mats.setflags(write=False)
    return mats


@lru_cache(maxsize=8)
def _row_enumeration(dimension: int) -> np.ndarray:
    """All sign row patterns of the given length, shape (2**N, N)."""
    if dimension > _MAX_ROW_BITS:
        raise EnumerationTooLargeError(
            f"{2**dimension} sign rows at dimension {dimension}; "
            f"the enumeration cap is 2**{_MAX_ROW_BITS}"
        )
    codes = np.arange(1 << dimension, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(dimension, dtype=np.int64)[None, :]) & 1
    rows = (2 * bits - 1).astype(np.int8)
    rows.setflags(write=False)
    return rows


def mgf_lhs_exact(dimension: int, rows: int, alpha: np.ndarray, h: float) -> float:
    """Exact ``E exp(h*S)`` over every symmetric sign matrix.

    ``S`` couples the first ``rows`` rows of one shared symmetric matrix, so
    this expectation sees the dependence between rows induced by the mirrored
    entries.
    """
    alpha = _check_alpha(alpha, dimension)
    if not 1 <= rows <= dimension:
        raise DimensionError(
            f"need 1 <= rows <= dimension, got {rows}, {dimension}"
        )
    mats = _symmetric_enumeration(dimension)
    q = mats[:, :rows, :].astype(np.float64) @ alpha / math.sqrt(dimension)
    s = np.einsum("ij,ij->i", q, q)
    return float(np.mean(np.exp(h * s)))


def mgf_rhs_exact(dimension: int, rows: int, alpha: np.ndarray, h: float) -> float:
    """``(E exp(h*Q**2))**rows`` with ``Q`` from one independent sign row.

    This is the value ``E exp(h*S)`` would take if the ``rows`` row statistics
    were independent copies.  Equality with :func:`mgf_lhs_exact` holds when
    ``rows <= 2`` or ``alpha`` is an axis vector; for three or more rows of a
    shared symmetric matrix the left side is strictly larger for generic
    ``alpha`` (the mirrored entries correlate the rows), so the two routes
    are kept separate and compared, never merged.
    """
    alpha = _check_alpha(alpha, dimension)
    if not 1 <= rows <= dimension:
        raise DimensionError(
            f"need 1 <= rows <= dimension, got {rows}, {dimension}"
        )
    patterns = _row_enumeration(dimension)
    q = patterns.astype(np.float64) @ alpha / math.sqrt(dimension)
    base = float(np.mean(np.exp(h * q * q)))
    return base ** rows


def moment4_exact(dimension: int, alpha: np.ndarray) -> float:
    """Exact ``E Q**4`` for one sign row, by enumeration of all row patterns."""
    alpha = _check_alpha(alpha, dimension)
    patterns = _row_enumeration(dimension)
    q = patterns.astype(np.float64) @ alpha / math.sqrt(dimension)
    return float(np.mean(q ** 4))


def row_mgf_bound(h: float, dimension: int) -> float:
    """Analytic bound ``(1 - 2h/N)**-0.5`` on ``E exp(h*Q**2)``, unit alpha.

    The row dot product with a unit vector has the sign-average property
    ``E exp(t*(M_1 . alpha)) <= exp(t**2/2)``, so its square's transform is
    dominated by the standard normal one; requires ``h < N/2``.
    """
    if dimension < 1:
        raise DimensionError(f"dimension must be positive, got {dimension}")
    if not h < dimension / 2.0:
        raise ValueError(f"bound requires h < dimension/2, got h={h}")
    return (1.0 - 2.0 * h / dimension) ** -0.5


def tail_bound(eps: float, rows: int) -> float:
    """Two-sided tail bound ``exp(-(rows/2)*(eps**2/2 - eps**3/3))``.

    Bounds the probability that ``(N/n)*S`` deviates from 1 by a relative
    ``eps`` in either direction.  Trivial (at or above 1) once
    ``eps >= 3/2``.
    """
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    if rows < 1:
        raise DimensionError(f"rows must be positive, got {rows}")
    return math.exp(-(rows / 2.0) * (eps * eps / 2.0 - eps ** 3 / 3.0))


@dataclass(frozen=True)
class TailCheckReport:
    """Monte Carlo tail frequencies against the analytic bound.

    ``upper_count`` trials had ``S >= (1+eps)*n/N`` and ``lower_count`` had
    ``S <= (1-eps)*n/N``.  ``slack_3se`` is three standard errors of a
    frequency sitting exactly at the bound, a natural pass margin for
    ``freq <= bound + slack``.
    """

    dimension: int
    rows: int
    eps: float
    trials: int
    upper_count: int
    lower_count: int
    bound: float
    mean_energy: float

    @property
    def upper_freq(self) -> float:
        return self.upper_count / self.trials

    @property
    def lower_freq(self) -> float:
        return self.lower_count / self.trials

    @property
    def slack_3se(self) -> float:
        return 3.0 * math.sqrt(self.bound * (1.0 - self.bound) / self.trials)


def empirical_tails(
    dimension: int, rows: int, eps_values, trials: int, master_seed: int
) -> tuple:
    """Tail frequencies at several thresholds over one shared trial sample.

    Trial ``t`` draws its symmetric matrix with seed
    ``derive_seed(master_seed, [t, 0])`` and its unit vector with
    ``derive_seed(master_seed, [t, 1])``, so any single trial can be
    reproduced in isolation; every threshold is evaluated against the same
    energies.  Returns one report per threshold, in the given order.
    """
    eps_values = tuple(eps_values)
    if not eps_values:
        raise DimensionError("need at least one eps value")
    if trials < 1:
        raise DimensionError(f"trials must be positive, got {trials}")
    bounds = [tail_bound(eps, rows) for eps in eps_values]
    target = rows / dimension
    upper = [0] * len(eps_values)
    lower = [0] * len(eps_values)
    total = 0.0
    for t in range(trials):
        full = gen_symmetric_sign_matrix(dimension, derive_seed(master_seed, [t, 0]))
        alpha = random_unit_vector(dimension, derive_seed(master_seed, [t, 1]))
        _, energy = q_statistics(full, rows, alpha)
        for i, eps in enumerate(eps_values):
            if energy >= (1.0 + eps) * target:
                upper[i] += 1
            if energy <= (1.0 - eps) * target:
                lower[i] += 1
        total += energy
    return tuple(
        TailCheckReport(
            dimension=dimension,
            rows=rows,
            eps=eps,
            trials=trials,
            upper_count=upper[i],
            lower_count=lower[i],
            bound=bounds[i],
            mean_energy=total / trials,
        )
        for i, eps in enumerate(eps_values)
    )


def empirical_tail(
    dimension: int, rows: int, eps: float, trials: int, master_seed: int
) -> TailCheckReport:
    """Single-threshold form of :func:`empirical_tails`."""
    return empirical_tails(dimension, rows, [eps], trials, master_seed)[0]


def jl_measurement_bound(eps: float, beta: float, points: int) -> float:
    """Real-valued row count ``(4 + 2*beta)/(eps**2/2 - eps**3/3) * ln(points)``.

    With at least this many rows, all pairwise squared distances of a set of
    ``points`` vectors are preserved to relative ``eps`` with probability at
    least ``1 - points**-beta``.  Natural logarithm; linear in ``ln(points)``.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    if points < 2:
        raise DimensionError(f"need at least 2 points, got {points}")
    return (4.0 + 2.0 * beta) / (eps * eps / 2.0 - eps ** 3 / 3.0) * math.log(points)


def jl_min_measurements(eps: float, beta: float, points: int) -> int:
    """Smallest integer row count meeting :func:`jl_measurement_bound`."""
    return math.ceil(jl_measurement_bound(eps, beta, points))


@dataclass(frozen=True)
class DistortionReport:
    """Pairwise squared-distance ratios of a projected point set.

    Ratios are ``|f(u) - f(v)|**2 / |u - v|**2`` over distinct pairs;
    coincident pairs are counted separately (their distances are preserved
    trivially) and excluded from the extremes.
    """

    eps: float
    pairs: int
    degenerate_pairs: int
    min_ratio: float
    max_ratio: float

    @property
    def within(self) -> bool:
        if self.pairs == self.degenerate_pairs:
            return True
        return (
            self.min_ratio >= 1.0 - self.eps and self.max_ratio <= 1.0 + self.eps
        )


def pairwise_distortion(matrix, points: np.ndarray, eps: float) -> DistortionReport:
    """Audit every pairwise distance of ``points`` under a measurement matrix.

    ``points`` has one vector per row; ``matrix`` is a MeasurementMatrix (or
    plain array) applied as the projection ``f``.
    """
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    entries = np.asarray(getattr(matrix, "entries", matrix), dtype=np.float64)
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != entries.shape[1]:
        raise DimensionError(
            f"points shape {pts.shape} does not match matrix width {entries.shape[1]}"
        )
    m = pts.shape[0]
    if m < 2:
        raise DimensionError(f"need at least 2 points, got {m}")
    ii, jj = np.triu_indices(m, k=1)
    diffs = pts[ii] - pts[jj]
    denom = np.einsum("ij,ij->i", diffs, diffs)
    projected = pts @ entries.T
    proj = projected[ii] - projected[jj]
    numer = np.einsum("ij,ij->i", proj, proj)
    live = denom > 0.0
    ratios = numer[live] / denom[live]
    degenerate = int(np.sum(~live))
    if ratios.size == 0:
        return DistortionReport(
            eps=eps,
            pairs=len(denom),
            degenerate_pairs=degenerate,
            min_ratio=math.nan,
            max_ratio=math.nan,
        )
    return DistortionReport(
        eps=eps,
        pairs=len(denom),
        degenerate_pairs=degenerate,
        min_ratio=float(ratios.min()),
        max_ratio=float(ratios.max()),
    )


def _check_alpha(alpha: np.ndarray, dimension: int) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (dimension,):
        raise DimensionError(
            f"alpha shape {alpha.shape} does not match dimension {dimension}"
        )
    return alpha
