"""Measurement matrix ensembles.

Five named ensembles, all scaled by ``n**-0.5`` where ``n`` is the number of
rows, so unit-variance entries give columns of expected unit norm:

``partial-symmetric-bernoulli``
    An ``N x N`` symmetric matrix of independent ``+-1`` entries on the upper
    triangle (diagonal included), mirrored below; the measurement matrix is
    its first ``n`` rows.
``iid-bernoulli``
    Independent ``+-1`` entries throughout, no symmetry.
``gaussian``
    Independent standard normal entries.
``toeplitz``
    Constant along diagonals.  Entry values come from a gaussian source
    matrix drawn with the same seed: row 0 of the source supplies the whole
    first row (corner included), and entries ``1..n-1`` of source row 1
    supply the rest of the first column.
``circulant``
    Row ``i`` is row 0 of the matching toeplitz source row cyclically shifted
    right by ``i``.

Sign draws consume one stream output per upper-triangle entry in row-major
order (for the symmetric ensemble) or per entry in row-major order (for
``iid-bernoulli``).  Gaussian-family ensembles consume ``n * N`` normal
variates row-major; toeplitz and circulant draw the full source matrix and
then read the entries they need, so the three share first rows at equal
seeds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .rng import Stream

ENSEMBLES = (
    "partial-symmetric-bernoulli",
    "iid-bernoulli",
    "gaussian",
    "toeplitz",
    "circulant",
)

__all__ = [
    "ENSEMBLES",
    "BinarySymmetricMatrix",
    "MeasurementMatrix",
    "SymmetricSignMatrix",
    "descriptor_from_json",
    "entries_csv",
    "from_adjacency",
    "gen_iid_ensemble",
    "gen_measurement",
    "gen_random_adjacency",
    "gen_structured",
    "gen_symmetric_sign_matrix",
    "partial_rows",
    "to_adjacency",
]


@dataclass(frozen=True, eq=False)
class SymmetricSignMatrix:
    """Full ``N x N`` symmetric matrix with ``+-1`` entries (int8)."""

    dimension: int
    seed: int
    signs: np.ndarray

    def __post_init__(self):
        s = self.signs
        if s.shape != (self.dimension, self.dimension):
            raise DimensionError(
                f"signs shape {s.shape} does not match dimension {self.dimension}"
            )
        if s.dtype != np.int8:
            raise DimensionError(f"signs must be int8, got {s.dtype}")
        if not np.array_equal(s, s.T):
            raise DimensionError("signs matrix is not symmetric")
        if not np.all(np.abs(s) == 1):
            raise DimensionError("signs entries must be +-1")


@dataclass(frozen=True, eq=False)
class BinarySymmetricMatrix:
    """Symmetric 0/1 adjacency-style matrix (self-loops allowed, uint8)."""

    dimension: int
    seed: int
    bits: np.ndarray

    def __post_init__(self):
        b = self.bits
        if b.shape != (self.dimension, self.dimension):
            raise DimensionError(
                f"bits shape {b.shape} does not match dimension {self.dimension}"
            )
        if b.dtype != np.uint8:
            raise DimensionError(f"bits must be uint8, got {b.dtype}")
        if not np.array_equal(b, b.T):
            raise DimensionError("bits matrix is not symmetric")
        if not np.all((b == 0) | (b == 1)):
            raise DimensionError("bits entries must be 0 or 1")


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """An ``n x N`` measurement matrix with its generation descriptor.

    ``entries`` is the scaled float matrix actually applied to signals.  For
    sign ensembles the unscaled int8 ``signs`` are retained so that integer
    arithmetic on them stays exact; ``entries == signs * scale`` elementwise.
    """

    ensemble: str
    rows: int
    dimension: int
    seed: int
    scale: float
    entries: np.ndarray
    signs: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise DimensionError(f"unknown ensemble {self.ensemble!r}")
        if not 1 <= self.rows <= self.dimension:
            raise DimensionError(
                f"need 1 <= rows <= dimension, got {self.rows}, {self.dimension}"
            )
        e = self.entries
        if e.shape != (self.rows, self.dimension):
            raise DimensionError(
                f"entries shape {e.shape} does not match ({self.rows}, {self.dimension})"
            )
        if e.dtype != np.float64:
            raise DimensionError(f"entries must be float64, got {e.dtype}")
        if self.signs is not None:
            s = self.signs
            if s.shape != e.shape or s.dtype != np.int8:
                raise DimensionError("signs must be int8 with the entries shape")
            if not np.array_equal(e, s.astype(np.float64) * self.scale):
                raise DimensionError("entries disagree with signs * scale")

    def descriptor(self) -> dict:
        return {
            "ensemble": self.ensemble,
            "n": self.rows,
            "N": self.dimension,
            "seed": self.seed,
            "scale": self.scale,
        }

    def descriptor_json(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)


def gen_symmetric_sign_matrix(dimension: int, seed: int) -> SymmetricSignMatrix:
    """Draw the full symmetric sign matrix for ``seed``.

    Upper-triangle entries (diagonal included) are filled in row-major order,
    one stream output each, then mirrored.
    """
    if dimension < 1:
        raise DimensionError(f"dimension must be positive, got {dimension}")
    stream = Stream(seed)
    count = dimension * (dimension + 1) // 2
    draws = stream.signs(count)
    signs = np.zeros((dimension, dimension), dtype=np.int8)
    iu = np.triu_indices(dimension)
    signs[iu] = draws
    il = np.tril_indices(dimension, k=-1)
    signs[il] = signs.T[il]
    return SymmetricSignMatrix(dimension=dimension, seed=seed, signs=signs)


def partial_rows(full: SymmetricSignMatrix, rows: int) -> MeasurementMatrix:
    """First ``rows`` rows of a symmetric sign matrix, scaled by ``rows**-0.5``."""
    if not 1 <= rows <= full.dimension:
        raise DimensionError(
            f"need 1 <= rows <= dimension, got {rows}, {full.dimension}"
        )
    scale = rows ** -0.5
    signs = np.ascontiguousarray(full.signs[:rows])
    return MeasurementMatrix(
        ensemble="partial-symmetric-bernoulli",
        rows=rows,
        dimension=full.dimension,
        seed=full.seed,
        scale=scale,
        entries=signs.astype(np.float64) * scale,
        signs=signs,
    )


def gen_iid_ensemble(rows: int, dimension: int, seed: int, kind: str) -> MeasurementMatrix:
    """Independent-entry ensembles: ``iid-bernoulli`` or ``gaussian``."""
    _check_shape(rows, dimension)
    stream = Stream(seed)
    scale = rows ** -0.5
    if kind == "iid-bernoulli":
        signs = stream.signs(rows * dimension).reshape(rows, dimension)
        return MeasurementMatrix(
            ensemble=kind,
            rows=rows,
            dimension=dimension,
            seed=seed,
            scale=scale,
            entries=signs.astype(np.float64) * scale,
            signs=signs,
        )
    if kind == "gaussian":
        vals = stream.normals(rows * dimension).reshape(rows, dimension)
        return MeasurementMatrix(
            ensemble=kind,
            rows=rows,
            dimension=dimension,
            seed=seed,
            scale=scale,
            entries=vals * scale,
        )
    raise DimensionError(f"unknown iid ensemble {kind!r}")


def gen_structured(rows: int, dimension: int, seed: int, kind: str) -> MeasurementMatrix:
    """Structured gaussian-source ensembles: ``toeplitz`` or ``circulant``."""
    _check_shape(rows, dimension)
    source = Stream(seed).normals(rows * dimension).reshape(rows, dimension)
    scale = rows ** -0.5
    if kind == "toeplitz":
        first_row = source[0]
        first_col = np.empty(rows)
        first_col[0] = source[0, 0]
        if rows > 1:
            first_col[1:] = source[1, 1:rows]
        vals = np.empty((rows, dimension))
        for i in range(rows):
            if i > 0:
                vals[i, :i] = first_col[i:0:-1]
            vals[i, i:] = first_row[: dimension - i]
    elif kind == "circulant":
        first_row = source[0]
        vals = np.empty((rows, dimension))
        for i in range(rows):
            vals[i] = np.roll(first_row, i)
    else:
        raise DimensionError(f"unknown structured ensemble {kind!r}")
    return MeasurementMatrix(
        ensemble=kind,
        rows=rows,
        dimension=dimension,
        seed=seed,
        scale=scale,
        entries=vals * scale,
    )


def gen_measurement(ensemble: str, rows: int, dimension: int, seed: int) -> MeasurementMatrix:
    """Dispatch to the named ensemble's generator."""
    if ensemble == "partial-symmetric-bernoulli":
        return partial_rows(gen_symmetric_sign_matrix(dimension, seed), rows)
    if ensemble in ("iid-bernoulli", "gaussian"):
        return gen_iid_ensemble(rows, dimension, seed, ensemble)
    if ensemble in ("toeplitz", "circulant"):
        return gen_structured(rows, dimension, seed, ensemble)
    raise DimensionError(f"unknown ensemble {ensemble!r}")


def gen_random_adjacency(dimension: int, seed: int) -> BinarySymmetricMatrix:
    """Random symmetric 0/1 matrix with self-loops allowed.

    Bit ``(i, j)`` on the upper triangle is 1 exactly when the sign draw at
    the same stream position is ``+1``, so the adjacency route and the sign
    route are two encodings of one coin sequence.
    """
    full = gen_symmetric_sign_matrix(dimension, seed)
    bits = ((full.signs + 1) // 2).astype(np.uint8)
    return BinarySymmetricMatrix(dimension=dimension, seed=seed, bits=bits)


def from_adjacency(adjacency: BinarySymmetricMatrix) -> SymmetricSignMatrix:
    """Map a 0/1 symmetric matrix A to the sign matrix 2A - 1."""
    signs = (2 * adjacency.bits.astype(np.int16) - 1).astype(np.int8)
    return SymmetricSignMatrix(
        dimension=adjacency.dimension, seed=adjacency.seed, signs=signs
    )


def to_adjacency(full: SymmetricSignMatrix) -> BinarySymmetricMatrix:
    """Inverse of :func:`from_adjacency`: A = (S + 1) / 2."""
    bits = ((full.signs + 1) // 2).astype(np.uint8)
    return BinarySymmetricMatrix(dimension=full.dimension, seed=full.seed, bits=bits)


def descriptor_from_json(text: str) -> MeasurementMatrix:
    """Regenerate a measurement matrix from its JSON descriptor.

    The descriptor must carry exactly the keys ``ensemble, n, N, seed,
    scale``; the scale is recomputed and checked against the stored value.
    """
    data = json.loads(text)
    expected = {"ensemble", "n", "N", "seed", "scale"}
    if set(data) != expected:
        raise DimensionError(
            f"descriptor keys {sorted(data)} do not match {sorted(expected)}"
        )
    matrix = gen_measurement(data["ensemble"], data["n"], data["N"], data["seed"])
    if matrix.scale != data["scale"]:
        raise DimensionError(
            f"descriptor scale {data['scale']!r} does not match recomputed {matrix.scale!r}"
        )
    return matrix


def entries_csv(matrix: MeasurementMatrix) -> str:
    """Entries as CSV, one row per line, values via repr for exact round-trip."""
    lines = [",".join(repr(float(v)) for v in row) for row in matrix.entries]
    return "\n".join(lines) + "\n"


def _check_shape(rows: int, dimension: int) -> None:
    if not 1 <= rows <= dimension:
        raise DimensionError(
            f"need 1 <= rows <= dimension, got {rows}, {dimension}"
        )
