"""Small dense linear algebra helpers.

Two of these are deliberately independent of ``numpy.linalg`` so they can act
as cross-checks on results that also flow through library routines:
``sym_eigen_extremes`` (cyclic Jacobi) and ``solve_spd`` (Cholesky with a
pivot guard).  Gram matrices of sign ensembles are computed in integer
arithmetic and divided by the row count once, so diagonals are exactly 1.0
and off-diagonals are single correctly rounded ratios.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, DimensionError, SingularMatrixError

__all__ = [
    "gram_on_support",
    "matvec",
    "soft_threshold",
    "solve_spd",
    "sym_eigen_extremes",
]


def matvec(matrix, vector: np.ndarray) -> np.ndarray:
    """Apply a MeasurementMatrix (or plain 2-d array) to a vector."""
    entries = getattr(matrix, "entries", matrix)
    entries = np.asarray(entries, dtype=np.float64)
    vector = np.asarray(vector, dtype=np.float64)
    if entries.ndim != 2 or vector.ndim != 1 or entries.shape[1] != vector.shape[0]:
        raise DimensionError(
            f"cannot apply shape {entries.shape} to vector of length {vector.shape}"
        )
    return entries @ vector


def gram_on_support(matrix, support: np.ndarray) -> np.ndarray:
    """Gram matrix of the columns indexed by ``support``.

    For matrices that retain integer signs the entries are computed as
    (integer sign dot product) / rows: the diagonal is exactly 1.0 and each
    off-diagonal is one rounded division.  The float fallback symmetrizes
    explicitly so the result is always an exactly symmetric array.
    """
    support = np.asarray(support, dtype=np.int64)
    if support.ndim != 1:
        raise DimensionError("support must be a 1-d index array")
    if support.size != np.unique(support).size:
        raise DimensionError("support has repeated indices")
    signs = getattr(matrix, "signs", None)
    if signs is not None:
        cols = signs[:, support].astype(np.int64)
        dots = cols.T @ cols
        return dots.astype(np.float64) / signs.shape[0]
    entries = getattr(matrix, "entries", matrix)
    cols = np.asarray(entries, dtype=np.float64)[:, support]
    g = cols.T @ cols
    return (g + g.T) / 2.0


def soft_threshold(values: np.ndarray, threshold: float) -> np.ndarray:
    """Elementwise shrink toward zero: sign(v) * max(|v| - threshold, 0)."""
    if threshold < 0:
        raise DimensionError(f"threshold must be nonnegative, got {threshold}")
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.0)


def sym_eigen_extremes(matrix: np.ndarray, tol: float = 1e-12, max_sweeps: int = 50):
    """Smallest and largest eigenvalue of a symmetric matrix by cyclic Jacobi.

    Runs full sweeps of Jacobi rotations over the strict upper triangle until
    the off-diagonal Frobenius norm drops below ``tol`` times the matrix
    Frobenius norm (or is exactly zero).  Returns ``(lo, hi)``.  Raises
    ConvergenceError if ``max_sweeps`` sweeps do not reach the tolerance.
    """
    a = np.array(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise DimensionError("matrix is not symmetric")
    a = (a + a.T) / 2.0
    d = a.shape[0]
    if d == 1:
        return float(a[0, 0]), float(a[0, 0])
    total = np.linalg.norm(a)
    if total == 0.0:
        return 0.0, 0.0
    mask = ~np.eye(d, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a[mask]))
        if off <= tol * total:
            diag = np.diag(a)
            return float(diag.min()), float(diag.max())
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # an entry too small to move the diagonal is already converged
                if abs(a[p, p]) + 100.0 * abs(apq) == abs(a[p, p]) and (
                    abs(a[q, q]) + 100.0 * abs(apq) == abs(a[q, q])
                ):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    # smaller-magnitude root for a stable rotation angle
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                h = t * apq
                a[p, p] -= h
                a[q, q] += h
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(d):
                    if r == p or r == q:
                        continue
                    grp = a[r, p]
                    grq = a[r, q]
                    a[r, p] = grp - s * (grq + grp * tau)
                    a[p, r] = a[r, p]
                    a[r, q] = grq + s * (grp - grq * tau)
                    a[q, r] = a[r, q]
    raise ConvergenceError("Jacobi sweeps did not reach tolerance", max_sweeps)


def solve_spd(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` for symmetric positive definite ``matrix``.

    Hand-rolled Cholesky with forward/back substitution and one step of
    iterative refinement.  A pivot at or below ``1e-12 * max diagonal``
    raises SingularMatrixError.
    """
    a = np.array(matrix, dtype=np.float64)
    b = np.array(rhs, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {a.shape}")
    d = a.shape[0]
    if b.shape != (d,):
        raise DimensionError(f"rhs shape {b.shape} does not match dimension {d}")
    if d == 0:
        return np.empty(0)
    guard = 1e-12 * max(float(np.abs(np.diag(a)).max()), 1e-300)
    lower = np.zeros((d, d))
    for j in range(d):
        pivot = a[j, j] - np.dot(lower[j, :j], lower[j, :j])
        if pivot <= guard:
            raise SingularMatrixError(f"pivot {pivot:.3e} at column {j}")
        lower[j, j] = np.sqrt(pivot)
        if j + 1 < d:
            lower[j + 1 :, j] = (
                a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]
            ) / lower[j, j]

    def cho_solve(rhs_vec):
        y = np.zeros(d)
        for i in range(d):
            y[i] = (rhs_vec[i] - np.dot(lower[i, :i], y[:i])) / lower[i, i]
        x = np.zeros(d)
        for i in range(d - 1, -1, -1):
            x[i] = (y[i] - np.dot(lower[i + 1 :, i], x[i + 1 :])) / lower[i, i]
        return x

    x = cho_solve(b)
    x = x + cho_solve(b - a @ x)
    return x
