"""L1-minimization solvers and tiny exact oracles.

``basis_pursuit`` and ``bpdn`` run ADMM with cached Cholesky factorizations,
sized for the experiment sweeps.  ``l1_oracle_small`` and ``l0_oracle_small``
solve the same problems by brute-force enumeration (LP vertices, supports) at
toy sizes; they share no iterate logic with the ADMM path, so the two routes
can be compared as independent witnesses and are never merged.

Both ADMM solvers map ``y -> -y`` to ``x -> -x`` exactly at the bit level:
every update (linear solves, soft thresholding, ball projection from a zero
start) is odd in IEEE arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import DimensionError, EnumerationTooLargeError, InfeasibleError, SingularMatrixError
from .linalg import soft_threshold, solve_spd

__all__ = [
    "SolverConfig",
    "SolverResult",
    "basis_pursuit",
    "bpdn",
    "l0_oracle_small",
    "l1_oracle_small",
    "verify_solution",
]


@dataclass(frozen=True)
class SolverConfig:
    """ADMM controls; the defaults suit the experiment sizes used here."""

    max_iterations: int = 5000
    primal_tol: float = 1e-7
    dual_tol: float = 1e-7
    penalty: float = 1.0
    feas_tol: float = 1e-6

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be positive, got {self.max_iterations}")
        for name in ("primal_tol", "dual_tol", "penalty", "feas_tol"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True, eq=False)
class SolverResult:
    """Solver outcome: the iterate, iteration count, and final residuals.

    ``status`` is ``"converged"``, ``"max-iterations"``, or
    ``"infeasible-detected"`` (the equality projection was unavailable or the
    returned point violates the constraint beyond ``feas_tol``).
    """

    solution: np.ndarray
    iterations: int
    status: str
    primal_residual: float
    dual_residual: float

    @property
    def objective(self) -> float:
        return float(np.abs(self.solution).sum())


def _entries(matrix) -> np.ndarray:
    entries = np.asarray(getattr(matrix, "entries", matrix), dtype=np.float64)
    if entries.ndim != 2:
        raise DimensionError(f"matrix must be 2-d, got shape {entries.shape}")
    return entries


def _check_rhs(entries: np.ndarray, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (entries.shape[0],):
        raise DimensionError(
            f"rhs shape {y.shape} does not match {entries.shape[0]} rows"
        )
    return y


def basis_pursuit(matrix, y: np.ndarray, config: SolverConfig | None = None) -> SolverResult:
    """Minimize ``|x|_1`` subject to ``Ax = y`` by ADMM.

    The x-update is the exact projection onto the affine constraint set via a
    cached factorization of ``A A^T``, so every iterate (and the returned
    solution) is feasible to factorization accuracy.  A rank-deficient row
    space leaves no projection to compute and is reported as
    ``infeasible-detected`` with a zero solution.
    """
    cfg = config or SolverConfig()
    a = _entries(matrix)
    y = _check_rhs(a, y)
    n, width = a.shape
    try:
        factor = cho_factor(a @ a.T)
    except LinAlgError:
        return SolverResult(
            solution=np.zeros(width),
            iterations=0,
            status="infeasible-detected",
            primal_residual=math.inf,
            dual_residual=math.inf,
        )
    particular = a.T @ cho_solve(factor, y)

    def project(v: np.ndarray) -> np.ndarray:
        return v - a.T @ cho_solve(factor, a @ v) + particular

    shrink = 1.0 / cfg.penalty
    z = np.zeros(width)
    u = np.zeros(width)
    x = np.zeros(width)
    status = "max-iterations"
    iterations = cfg.max_iterations
    primal = math.inf
    dual = math.inf
    for it in range(1, cfg.max_iterations + 1):
        x = project(z - u)
        z_old = z
        z = soft_threshold(x + u, shrink)
        u = u + x - z
        primal = float(np.linalg.norm(x - z))
        dual = cfg.penalty * float(np.linalg.norm(z - z_old))
        if primal <= cfg.primal_tol and dual <= cfg.dual_tol:
            status = "converged"
            iterations = it
            break
    feas = float(np.linalg.norm(a @ x - y))
    if feas > cfg.feas_tol * max(1.0, float(np.linalg.norm(y))):
        status = "infeasible-detected"
    return SolverResult(
        solution=x,
        iterations=iterations,
        status=status,
        primal_residual=primal,
        dual_residual=dual,
    )


def bpdn(
    matrix, y: np.ndarray, epsilon: float, config: SolverConfig | None = None
) -> SolverResult:
    """Minimize ``|x|_1`` subject to ``|Ax - y|_2 <= epsilon`` by ADMM.

    Three-block splitting: an l1 copy of ``x``, a residual copy of ``Ax``
    projected onto the epsilon-ball around ``y``, and an x-update solved
    through the Woodbury identity with a cached factorization of
    ``I + A A^T``.  ``epsilon = 0`` delegates to :func:`basis_pursuit`;
    ``|y|_2 <= epsilon`` returns the zero solution immediately.
    """
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    cfg = config or SolverConfig()
    a = _entries(matrix)
    y = _check_rhs(a, y)
    if epsilon == 0.0:
        return basis_pursuit(matrix, y, cfg)
    n, width = a.shape
    if float(np.linalg.norm(y)) <= epsilon:
        return SolverResult(
            solution=np.zeros(width),
            iterations=0,
            status="converged",
            primal_residual=0.0,
            dual_residual=0.0,
        )
    factor = cho_factor(np.eye(n) + a @ a.T)

    def solve_normal(b: np.ndarray) -> np.ndarray:
        return b - a.T @ cho_solve(factor, a @ b)

    def ball(v: np.ndarray) -> np.ndarray:
        gap = v - y
        norm = float(np.linalg.norm(gap))
        if norm <= epsilon:
            return v
        return y + gap * (epsilon / norm)

    shrink = 1.0 / cfg.penalty
    z = np.zeros(width)
    w = np.zeros(n)
    u1 = np.zeros(width)
    u2 = np.zeros(n)
    x = np.zeros(width)
    status = "max-iterations"
    iterations = cfg.max_iterations
    primal = math.inf
    dual = math.inf
    for it in range(1, cfg.max_iterations + 1):
        x = solve_normal((z - u1) + a.T @ (w - u2))
        ax = a @ x
        z_old = z
        w_old = w
        z = soft_threshold(x + u1, shrink)
        w = ball(ax + u2)
        u1 = u1 + x - z
        u2 = u2 + ax - w
        primal = math.hypot(
            float(np.linalg.norm(x - z)), float(np.linalg.norm(ax - w))
        )
        dual = cfg.penalty * math.hypot(
            float(np.linalg.norm(z - z_old)),
            float(np.linalg.norm(a.T @ (w - w_old))),
        )
        if primal <= cfg.primal_tol and dual <= cfg.dual_tol:
            status = "converged"
            iterations = it
            break
    feas = float(np.linalg.norm(a @ x - y))
    if feas > epsilon + cfg.feas_tol * max(1.0, float(np.linalg.norm(y))):
        status = "infeasible-detected"
    return SolverResult(
        solution=x,
        iterations=iterations,
        status=status,
        primal_residual=primal,
        dual_residual=dual,
    )


def verify_solution(matrix, x: np.ndarray, y: np.ndarray, epsilon: float = 0.0,
                    feas_tol: float = 1e-6) -> bool:
    """Whether ``x`` satisfies the (noisy) measurement constraint."""
    a = _entries(matrix)
    y = _check_rhs(a, y)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (a.shape[1],):
        raise DimensionError(f"x shape {x.shape} does not match {a.shape[1]} columns")
    gap = float(np.linalg.norm(a @ x - y))
    return gap <= epsilon + feas_tol * max(1.0, float(np.linalg.norm(y)))


_ORACLE_BASIS_CAP = 200_000


def l1_oracle_small(matrix, y: np.ndarray, tol: float = 1e-9, details: bool = False):
    """Exact l1 minimizer at toy sizes by LP vertex enumeration.

    Splits ``x`` into positive and negative parts, making the problem a
    linear program over ``[A, -A]`` with nonnegative variables, and visits
    every candidate vertex: supports of size ``rank(A)`` solved by least
    squares, accepted when feasible to ``tol``.  Returns the optimal vertex,
    breaking objective ties (within 1e-9) lexicographically.  With
    ``details=True`` also returns ``{"objective", "optimal_vertices",
    "unique"}`` where vertices count optima within 1e-7 of the best
    objective and uniqueness means all of them agree with the winner to
    1e-7.  Raises InfeasibleError when ``y`` is outside the row space.
    """
    a = _entries(matrix)
    y = _check_rhs(a, y)
    n, width = a.shape
    stacked = np.hstack([a, -a])
    rank = int(np.linalg.matrix_rank(stacked))
    if rank == 0:
        if float(np.linalg.norm(y)) <= tol:
            x = np.zeros(width)
            return (x, {"objective": 0.0, "optimal_vertices": 1, "unique": True}) if details else x
        raise InfeasibleError("zero matrix cannot match a nonzero rhs")
    if math.comb(2 * width, rank) > _ORACLE_BASIS_CAP:
        raise EnumerationTooLargeError(
            f"{math.comb(2 * width, rank)} candidate supports; "
            f"the oracle cap is {_ORACLE_BASIS_CAP}"
        )
    lstsq_fit, residual, lstsq_rank, _ = np.linalg.lstsq(stacked, y, rcond=None)
    if float(np.linalg.norm(stacked @ lstsq_fit - y)) > tol * max(1.0, float(np.linalg.norm(y))):
        raise InfeasibleError("rhs lies outside the matrix row space")
    feas_cut = tol * max(1.0, float(np.linalg.norm(y)))
    candidates = []
    for support in combinations(range(2 * width), rank):
        cols = stacked[:, support]
        coef, *_ = np.linalg.lstsq(cols, y, rcond=None)
        if float(np.linalg.norm(cols @ coef - y)) > feas_cut:
            continue
        if coef.min() < -tol:
            continue
        coef = np.where(coef < tol, 0.0, coef)
        x = np.zeros(width)
        for idx, val in zip(support, coef):
            if idx < width:
                x[idx] += val
            else:
                x[idx - width] -= val
        candidates.append((float(coef.sum()), x))
    if not candidates:
        raise InfeasibleError("no feasible vertex found")
    best_obj = min(obj for obj, _ in candidates)
    tied = [x for obj, x in candidates if obj <= best_obj + 1e-9]
    best_x = min(tied, key=tuple)
    if not details:
        return best_x
    near = [x for obj, x in candidates if obj <= best_obj + 1e-7]
    distinct = [best_x]
    for x in near:
        if all(float(np.abs(x - d).max()) > 1e-7 for d in distinct):
            distinct.append(x)
    return best_x, {
        "objective": best_obj,
        "optimal_vertices": len(distinct),
        "unique": len(distinct) == 1,
    }


def l0_oracle_small(matrix, y: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Sparsest exact fit at toy sizes by support enumeration.

    Visits supports in order of size then lexicographic position; each is fit
    through the in-package normal-equation solver and the first fit within
    ``tol`` wins.  Singular supports are skipped.  Raises InfeasibleError
    when no support up to the row count fits.
    """
    a = _entries(matrix)
    y = _check_rhs(a, y)
    n, width = a.shape
    if width > 12:
        raise EnumerationTooLargeError(
            f"support enumeration over {width} columns; the oracle cap is 12"
        )
    cut = tol * max(1.0, float(np.linalg.norm(y)))
    if float(np.linalg.norm(y)) <= cut:
        return np.zeros(width)
    for size in range(1, min(n, width) + 1):
        for support in combinations(range(width), size):
            cols = a[:, list(support)]
            try:
                coef = solve_spd(cols.T @ cols, cols.T @ y)
            except SingularMatrixError:
                continue
            if float(np.linalg.norm(cols @ coef - y)) <= cut:
                x = np.zeros(width)
                x[list(support)] = coef
                return x
    raise InfeasibleError("no support fits the rhs exactly")
