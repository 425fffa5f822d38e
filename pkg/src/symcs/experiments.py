"""Planted sparse recovery trials and deterministic sweeps.

A trial is fully determined by its seed: the trial seed splits into matrix,
signal, and noise sub-seeds (labels 0, 1, 2), the measurement matrix is
regenerated fresh for every trial, and the noiseless path consumes no noise
draws at all.  A sweep addresses each trial as
``derive_seed(master_seed, [ensemble_index, axis_index, trial_index])``
where the ensemble index is the position in the canonical ensemble tuple
(not in the sweep's own list), so adding or reordering ensembles in a spec
never changes any other ensemble's trials.

Success means relative l2 error at or below the tolerance (1e-3 by
default).  Noisy trials solve the residual-ball problem with the ball radius
set to the realized noise norm; noiseless trials solve the equality-
constrained problem.

Results serialize to a canonical CSV (fixed header, floats via repr) and a
JSON mirror (sorted keys, indent 2) that additionally carries per-row SNR
aggregates for noisy rows; a relative error of exactly zero is reported by
the distinguished marker ``EXACT_SNR`` rather than an infinite decibel
value, and such trials are counted separately and excluded from the SNR
mean.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Final

import numpy as np

from .ensembles import ENSEMBLES, gen_measurement
from .errors import (
    ConvergenceError,
    DimensionError,
    InfeasibleError,
    SingularMatrixError,
    UndefinedMetricError,
)
from .rng import Stream, derive_seed
from .solver import SolverConfig, basis_pursuit, bpdn

EXACT_SNR: Final = "exact"

SIGNAL_KINDS = ("pm1", "gaussian")

_CSV_HEADER = "ensemble,axis,axis_value,trials,successes,success_rate,mean_rel_err,mean_iterations"

_SOLVER_KEYS = {
    "maxIterations": "max_iterations",
    "primalTol": "primal_tol",
    "dualTol": "dual_tol",
    "penalty": "penalty",
    "feasTol": "feas_tol",
}

__all__ = [
    "EXACT_SNR",
    "SIGNAL_KINDS",
    "ExperimentSpec",
    "SparseSignal",
    "SweepResult",
    "SweepRow",
    "TrialOutcome",
    "derive_seed",
    "mse",
    "plant_signal",
    "read_results",
    "rel_err",
    "results_csv",
    "results_json",
    "run_trial",
    "snr_db",
    "sweep",
    "write_results",
]


@dataclass(frozen=True, eq=False)
class SparseSignal:
    """Dense vector with a known support."""

    vector: np.ndarray
    support: np.ndarray
    kind: str

    @property
    def sparsity(self) -> int:
        return int(self.support.size)


def plant_signal(dimension: int, sparsity: int, kind: str, seed: int) -> SparseSignal:
    """Draw a sparse vector: a uniform support, then coefficients.

    ``kind`` is ``"pm1"`` (random signs) or ``"gaussian"``.  One stream
    serves both stages, support first, so the whole signal is a function of
    the seed alone.
    """
    if not 1 <= sparsity <= dimension:
        raise DimensionError(
            f"need 1 <= sparsity <= dimension, got {sparsity}, {dimension}"
        )
    if kind not in SIGNAL_KINDS:
        raise DimensionError(f"unknown signal kind {kind!r}")
    stream = Stream(seed)
    support = stream.sample_without_replacement(dimension, sparsity)
    if kind == "pm1":
        coeffs = stream.signs(sparsity).astype(np.float64)
    else:
        coeffs = stream.normals(sparsity)
    vector = np.zeros(dimension)
    vector[support] = coeffs
    return SparseSignal(vector=vector, support=support, kind=kind)


def rel_err(estimate: np.ndarray, reference: np.ndarray) -> float:
    """Relative l2 error; undefined for a zero reference."""
    reference = np.asarray(reference, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    if reference.shape != estimate.shape:
        raise DimensionError(
            f"shapes {estimate.shape} and {reference.shape} do not match"
        )
    denom = float(np.linalg.norm(reference))
    if denom == 0.0:
        raise UndefinedMetricError("relative error against a zero reference")
    return float(np.linalg.norm(estimate - reference)) / denom


def mse(estimate: np.ndarray, reference: np.ndarray) -> float:
    """Mean squared entrywise error."""
    reference = np.asarray(reference, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    if reference.shape != estimate.shape:
        raise DimensionError(
            f"shapes {estimate.shape} and {reference.shape} do not match"
        )
    gap = estimate - reference
    return float(np.mean(gap * gap))


def snr_db(relative_error: float):
    """``-20*log10(rel_err)`` in decibels; exactly-zero error -> EXACT_SNR."""
    if relative_error < 0.0:
        raise ValueError(f"relative error cannot be negative, got {relative_error}")
    if relative_error == 0.0:
        return EXACT_SNR
    return -20.0 * math.log10(relative_error)


@dataclass(frozen=True)
class TrialOutcome:
    rel_err: float
    success: bool
    iterations: int
    status: str


def run_trial(
    ensemble: str,
    dimension: int,
    rows: int,
    sparsity: int,
    kind: str,
    sigma: float,
    trial_seed: int,
    success_tol: float = 1e-3,
    config: SolverConfig | None = None,
) -> TrialOutcome:
    """One planted recovery trial, fully determined by ``trial_seed``.

    Sub-seeds: label 0 draws the matrix, label 1 the signal, label 2 the
    noise (consumed only when ``sigma > 0``).  A raising solve is recorded
    as an infinite error rather than propagated, so sweeps always complete.
    """
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    matrix = gen_measurement(ensemble, rows, dimension, derive_seed(trial_seed, [0]))
    signal = plant_signal(dimension, sparsity, kind, derive_seed(trial_seed, [1]))
    y = matrix.entries @ signal.vector
    try:
        if sigma > 0.0:
            noise = sigma * Stream(derive_seed(trial_seed, [2])).normals(rows)
            y = y + noise
            result = bpdn(matrix, y, float(np.linalg.norm(noise)), config)
        else:
            result = basis_pursuit(matrix, y, config)
        error = rel_err(result.solution, signal.vector)
        return TrialOutcome(
            rel_err=error,
            success=error <= success_tol,
            iterations=result.iterations,
            status=result.status,
        )
    except (ConvergenceError, SingularMatrixError, InfeasibleError, np.linalg.LinAlgError):
        return TrialOutcome(
            rel_err=math.inf, success=False, iterations=0, status="error"
        )


@dataclass(frozen=True)
class ExperimentSpec:
    """Sweep description: one varying axis, everything else pinned.

    ``axis`` is ``"n"`` (row count), ``"k"`` (sparsity), or ``"sigma"``
    (noise level); ``fixed`` pins the quantities the axis does not vary and
    may set ``kind`` (default ``"pm1"``) and, for the n and k axes,
    ``sigma`` (default 0).
    """

    dimension: int
    axis: str
    axis_values: tuple
    fixed: dict
    trials: int
    ensembles: tuple
    master_seed: int
    success_tol: float = 1e-3
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.dimension < 1:
            raise DimensionError(f"dimension must be positive, got {self.dimension}")
        if self.axis not in ("n", "k", "sigma"):
            raise DimensionError(f"axis must be n, k, or sigma, got {self.axis!r}")
        if not self.axis_values:
            raise DimensionError("axisValues must be nonempty")
        if self.trials < 1:
            raise DimensionError(f"trials must be positive, got {self.trials}")
        if not self.ensembles:
            raise DimensionError("ensembleList must be nonempty")
        for name in self.ensembles:
            if name not in ENSEMBLES:
                raise DimensionError(f"unknown ensemble {name!r}")
        if len(set(self.ensembles)) != len(self.ensembles):
            raise DimensionError("ensembleList has duplicates")
        if not self.success_tol > 0.0:
            raise ValueError(f"successTol must be positive, got {self.success_tol}")
        required = {"n": {"k"}, "k": {"n"}, "sigma": {"n", "k"}}[self.axis]
        optional = {"kind"} if self.axis == "sigma" else {"kind", "sigma"}
        keys = set(self.fixed)
        if not required <= keys or not keys <= required | optional:
            raise DimensionError(
                f"fixed keys {sorted(keys)} must cover {sorted(required)} and "
                f"stay within {sorted(required | optional)}"
            )
        if self.fixed.get("kind", "pm1") not in SIGNAL_KINDS:
            raise DimensionError(f"unknown signal kind {self.fixed.get('kind')!r}")
        if float(self.fixed.get("sigma", 0.0)) < 0.0:
            raise ValueError("fixed sigma must be nonnegative")
        for name in ("n", "k"):
            if name in self.fixed and not 1 <= int(self.fixed[name]) <= self.dimension:
                raise DimensionError(
                    f"fixed {name}={self.fixed[name]} out of range for "
                    f"dimension {self.dimension}"
                )
        for value in self.axis_values:
            if self.axis == "sigma":
                if float(value) < 0.0:
                    raise ValueError(f"sigma axis value {value} is negative")
            elif not 1 <= int(value) <= self.dimension:
                raise DimensionError(
                    f"{self.axis} axis value {value} out of range for "
                    f"dimension {self.dimension}"
                )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise DimensionError("spec must be a JSON object")
        required = {"N", "axis", "axisValues", "fixed", "trials", "ensembleList", "masterSeed"}
        optional = {"successTol", "solver"}
        keys = set(data)
        if not required <= keys or not keys <= required | optional:
            raise DimensionError(
                f"spec keys {sorted(keys)} must cover {sorted(required)} and "
                f"stay within {sorted(required | optional)}"
            )
        solver_cfg = SolverConfig()
        if "solver" in data:
            raw = data["solver"]
            if not isinstance(raw, dict) or not set(raw) <= set(_SOLVER_KEYS):
                raise DimensionError(
                    f"solver keys must stay within {sorted(_SOLVER_KEYS)}"
                )
            solver_cfg = SolverConfig(
                **{_SOLVER_KEYS[key]: value for key, value in raw.items()}
            )
        return cls(
            dimension=int(data["N"]),
            axis=data["axis"],
            axis_values=tuple(data["axisValues"]),
            fixed=dict(data["fixed"]),
            trials=int(data["trials"]),
            ensembles=tuple(data["ensembleList"]),
            master_seed=int(data["masterSeed"]),
            success_tol=float(data.get("successTol", 1e-3)),
            solver=solver_cfg,
        )

    def to_json(self) -> str:
        cfg = self.solver
        data = {
            "N": self.dimension,
            "axis": self.axis,
            "axisValues": list(self.axis_values),
            "fixed": self.fixed,
            "trials": self.trials,
            "ensembleList": list(self.ensembles),
            "masterSeed": self.master_seed,
            "successTol": self.success_tol,
            "solver": {
                "maxIterations": cfg.max_iterations,
                "primalTol": cfg.primal_tol,
                "dualTol": cfg.dual_tol,
                "penalty": cfg.penalty,
                "feasTol": cfg.feas_tol,
            },
        }
        return json.dumps(data, sort_keys=True, indent=2)

    def cell_params(self, value):
        """(rows, sparsity, sigma, kind) for one axis value."""
        kind = self.fixed.get("kind", "pm1")
        if self.axis == "n":
            return int(value), int(self.fixed["k"]), float(self.fixed.get("sigma", 0.0)), kind
        if self.axis == "k":
            return int(self.fixed["n"]), int(value), float(self.fixed.get("sigma", 0.0)), kind
        return int(self.fixed["n"]), int(self.fixed["k"]), float(value), kind


@dataclass(frozen=True)
class SweepRow:
    """Aggregates for one (ensemble, axis value) cell.

    ``mean_snr_db`` and ``exact_count`` are populated for noisy cells and
    for every cell of a sigma-axis sweep (including its sigma=0 baseline);
    ``mean_snr_db`` is None when every contributing trial was exact.
    """

    ensemble: str
    axis: str
    axis_value: object
    trials: int
    successes: int
    mean_rel_err: float
    mean_iterations: float
    mean_snr_db: float | None = None
    exact_count: int | None = None

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


@dataclass(frozen=True)
class SweepResult:
    spec: ExperimentSpec
    rows: tuple


def _run_cell(spec: ExperimentSpec, ensemble: str, axis_index: int) -> SweepRow:
    value = spec.axis_values[axis_index]
    rows_n, sparsity, sigma, kind = spec.cell_params(value)
    ensemble_index = ENSEMBLES.index(ensemble)
    errors = []
    iterations = []
    successes = 0
    for trial in range(spec.trials):
        seed = derive_seed(spec.master_seed, [ensemble_index, axis_index, trial])
        outcome = run_trial(
            ensemble,
            spec.dimension,
            rows_n,
            sparsity,
            kind,
            sigma,
            seed,
            spec.success_tol,
            spec.solver,
        )
        errors.append(outcome.rel_err)
        iterations.append(outcome.iterations)
        successes += outcome.success
    mean_err = float(np.mean(errors))
    mean_iter = float(np.mean(iterations))
    if sigma > 0.0 or spec.axis == "sigma":
        finite = [snr_db(e) for e in errors if e > 0.0]
        exact = sum(1 for e in errors if e == 0.0)
        mean_snr = float(np.mean(finite)) if finite else None
        return SweepRow(
            ensemble=ensemble,
            axis=spec.axis,
            axis_value=value,
            trials=spec.trials,
            successes=successes,
            mean_rel_err=mean_err,
            mean_iterations=mean_iter,
            mean_snr_db=mean_snr,
            exact_count=exact,
        )
    return SweepRow(
        ensemble=ensemble,
        axis=spec.axis,
        axis_value=value,
        trials=spec.trials,
        successes=successes,
        mean_rel_err=mean_err,
        mean_iterations=mean_iter,
    )


def sweep(spec: ExperimentSpec, threads: int = 1) -> SweepResult:
    """Run every (ensemble, axis value) cell of a spec.

    Row order is ensembles in spec order, then axis values in spec order.
    ``threads`` only parallelizes independent cells; seeds are derived per
    trial, so the result is identical for any thread count.
    """
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}")
    tasks = [
        (ensemble, axis_index)
        for ensemble in spec.ensembles
        for axis_index in range(len(spec.axis_values))
    ]
    if threads == 1:
        rows = [_run_cell(spec, ensemble, idx) for ensemble, idx in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(
                pool.map(lambda t: _run_cell(spec, t[0], t[1]), tasks)
            )
    return SweepResult(spec=spec, rows=tuple(rows))


def _axis_value_repr(value) -> str:
    if isinstance(value, bool):
        raise DimensionError("axis value cannot be a bool")
    if isinstance(value, (int, np.integer)):
        return repr(int(value))
    return repr(float(value))


def results_csv(result: SweepResult) -> str:
    """Canonical CSV: fixed header, one row per cell, floats via repr."""
    lines = [_CSV_HEADER]
    for row in result.rows:
        lines.append(
            ",".join(
                [
                    row.ensemble,
                    row.axis,
                    _axis_value_repr(row.axis_value),
                    repr(row.trials),
                    repr(row.successes),
                    repr(row.success_rate),
                    repr(row.mean_rel_err),
                    repr(row.mean_iterations),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def results_json(result: SweepResult) -> str:
    """JSON mirror of the CSV plus SNR aggregates for noisy rows."""
    rows = []
    for row in result.rows:
        entry = {
            "ensemble": row.ensemble,
            "axis": row.axis,
            "axis_value": row.axis_value,
            "trials": row.trials,
            "successes": row.successes,
            "success_rate": row.success_rate,
            "mean_rel_err": row.mean_rel_err,
            "mean_iterations": row.mean_iterations,
        }
        if row.exact_count is not None:
            entry["exact_count"] = row.exact_count
            entry["mean_snr_db"] = (
                EXACT_SNR if row.mean_snr_db is None else row.mean_snr_db
            )
        rows.append(entry)
    data = {"spec": json.loads(result.spec.to_json()), "rows": rows}
    return json.dumps(data, sort_keys=True, indent=2)


def write_results(result: SweepResult, csv_path, json_path=None) -> None:
    with open(csv_path, "w") as handle:
        handle.write(results_csv(result))
    if json_path is not None:
        with open(json_path, "w") as handle:
            handle.write(results_json(result))


def read_results(text: str) -> tuple:
    """Parse :func:`results_csv` output back into SweepRow tuples."""
    lines = text.strip().split("\n")
    if not lines or lines[0] != _CSV_HEADER:
        raise DimensionError(f"unexpected CSV header {lines[0] if lines else ''!r}")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 8:
            raise DimensionError(f"expected 8 fields, got {len(parts)}: {line!r}")
        ensemble, axis, value_text, trials, successes, rate, mean_err, mean_iter = parts
        try:
            value = int(value_text)
        except ValueError:
            value = float(value_text)
        row = SweepRow(
            ensemble=ensemble,
            axis=axis,
            axis_value=value,
            trials=int(trials),
            successes=int(successes),
            mean_rel_err=float(mean_err),
            mean_iterations=float(mean_iter),
        )
        if row.success_rate != float(rate):
            raise DimensionError(
                f"success_rate {rate} disagrees with {row.successes}/{row.trials}"
            )
        rows.append(row)
    return tuple(rows)
