"""Seeded random projection matrices.

Matrices hold the raw unit-variance entries ``r_ij``.  The ``1/sqrt(q)``
scaling is applied once, inside :func:`project` / :func:`project_batch`.

Random numbers come from numpy's PCG64 bit generator seeded with the
matrix seed; Gaussian entries use ``Generator.standard_normal`` (the
ziggurat sampler).  Within an ensemble, matrix ``k`` is seeded with
``base_seed + k``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, InvalidParameterError

SQRT3 = math.sqrt(3.0)


class ProjectionScheme(str, enum.Enum):
    BERNOULLI = "bernoulli"
    ACHLIOPTAS = "achlioptas"
    GAUSSIAN = "gaussian"


def make_rng(seed: int) -> np.random.Generator:
    """Return the package's canonical generator for ``seed``."""
    if seed < 0 or seed >= 2**64:
        raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """A ``p x q`` matrix of unscaled random entries."""

    p: int
    q: int
    scheme: ProjectionScheme
    seed: int
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (self.p, self.q):
            raise InvalidDimensionError(
                f"entries have shape {self.entries.shape}, expected {(self.p, self.q)}"
            )
        self.entries.setflags(write=False)

    @classmethod
    def from_entries(cls, entries, scheme=ProjectionScheme.GAUSSIAN, seed=0):
        """Wrap an explicit matrix (used mainly for hand-built test cases)."""
        arr = np.array(entries, dtype=np.float64, ndmin=2)
        return cls(arr.shape[0], arr.shape[1], ProjectionScheme(scheme), seed, arr)


def _draw_entries(rng: np.random.Generator, p: int, q: int, scheme: ProjectionScheme):
    if scheme is ProjectionScheme.BERNOULLI:
        return rng.integers(0, 2, size=(p, q)).astype(np.float64) * 2.0 - 1.0
    if scheme is ProjectionScheme.ACHLIOPTAS:
        # six equiprobable faces: one -> -sqrt3, one -> +sqrt3, four -> 0
        faces = rng.integers(0, 6, size=(p, q))
        out = np.zeros((p, q))
        out[faces == 0] = -SQRT3
        out[faces == 5] = SQRT3
        return out
    return rng.standard_normal(size=(p, q))


def generate_matrix(p: int, q: int, scheme=ProjectionScheme.GAUSSIAN, seed: int = 0) -> ProjectionMatrix:
    """Draw a fresh ``p x q`` projection matrix.

    Identical ``(p, q, scheme, seed)`` always give bit-identical entries.
    """
    if p < 1 or q < 1:
        raise InvalidDimensionError(f"p and q must be positive, got p={p}, q={q}")
    scheme = ProjectionScheme(scheme)
    entries = _draw_entries(make_rng(seed), p, q, scheme)
    return ProjectionMatrix(p, q, scheme, seed, entries)


def project(matrix: ProjectionMatrix, x) -> np.ndarray:
    """Map one up-space vector to the down-space: ``z = x R / sqrt(q)``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != matrix.p:
        raise InvalidDimensionError(f"expected a vector of length {matrix.p}, got shape {x.shape}")
    return (x @ matrix.entries) / math.sqrt(matrix.q)


def project_batch(matrix: ProjectionMatrix, X) -> np.ndarray:
    """Row-wise :func:`project` for an ``n x p`` matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 2 and X.shape[0] == 0 and X.shape[1] in (0, matrix.p):
        return np.empty((0, matrix.q))
    if X.ndim != 2 or X.shape[1] != matrix.p:
        raise InvalidDimensionError(f"expected an n x {matrix.p} matrix, got shape {X.shape}")
    # row-at-a-time so each output row is bit-identical to project(row)
    scale = math.sqrt(matrix.q)
    return np.array([(row @ matrix.entries) / scale for row in X]).reshape(X.shape[0], matrix.q)
