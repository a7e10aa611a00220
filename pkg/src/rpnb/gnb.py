"""Gaussian Naive Bayes in one down-space, with exact streaming moments.

The per-class statistics are population moments (divisor ``N``).  A batch
of ``n`` new rows for class ``m`` is merged as::

    N = prior count,  T = N + n
    mu'     = (N * mu + sum(z)) / T
    sigma2' = (N * (sigma2 + (mu - mu')**2) + sum((z - mu')**2)) / T

so the initial ``(mu0, sigma2_0)`` carries zero weight once a class has
seen its first update.  Stored variances stay exact; ``variance_floor`` is
applied only when scoring.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import (
    InvalidBatchError,
    InvalidClassError,
    InvalidDimensionError,
    InvalidParameterError,
)

LOG_2PI = math.log(2.0 * math.pi)


class PriorMode(str, enum.Enum):
    UNIFORM = "uniform"
    EMPIRICAL = "empirical"


def merge_moments(mu, sigma2, count, Z):
    """Merge a batch into running population moments.

    Parameters
    ----------
    mu, sigma2 : ndarray of shape (..., q)
        Current moments.
    count : int
        Number of observations already summarized by ``mu``/``sigma2``.
    Z : ndarray of shape (..., n, q)
        New observations, ``n >= 1``.

    Returns
    -------
    (mu_new, sigma2_new) : tuple of ndarray of shape (..., q)
    """
    n = Z.shape[-2]
    total = count + n
    mu_new = (count * mu + Z.sum(axis=-2)) / total
    resid = Z - mu_new[..., None, :]
    sigma2_new = (count * (sigma2 + (mu - mu_new) ** 2) + (resid**2).sum(axis=-2)) / total
    return mu_new, sigma2_new


def step_moments(mu, sigma2, t, z):
    """Single-observation form of :func:`merge_moments`; ``t`` counts ``z``."""
    mu_new = ((t - 1) * mu + z) / t
    sigma2_new = ((t - 1) * (sigma2 + (mu - mu_new) ** 2) + (z - mu_new) ** 2) / t
    return mu_new, sigma2_new


def gaussian_log_likelihood(z, mu, sigma2, variance_floor):
    """Sum over the last axis of per-feature Gaussian log densities."""
    s2 = np.maximum(sigma2, variance_floor)
    return -0.5 * (LOG_2PI + np.log(s2) + (z - mu) ** 2 / s2).sum(axis=-1)


def log_prior(class_counts, prior_mode):
    """Per-class log prior; empirical mode uses add-one smoothing."""
    M = class_counts.shape[-1]
    if PriorMode(prior_mode) is PriorMode.UNIFORM:
        return np.full(class_counts.shape, -math.log(M))
    counts = class_counts.astype(np.float64)
    return np.log((counts + 1.0) / (counts.sum(axis=-1, keepdims=True) + M))


class GnbModel:
    """Per-class, per-feature Gaussian moments for one down-space.

    ``mu`` and ``sigma2`` have shape ``(M, q)``; ``class_counts`` counts the
    observations each class has absorbed through updates.
    """

    def __init__(
        self,
        n_classes: int,
        dim: int,
        mu0: float = 0.0,
        sigma2_0: float = 1.0,
        prior_mode=PriorMode.UNIFORM,
        variance_floor: float = 1e-9,
    ):
        _check_params(n_classes, dim, sigma2_0, variance_floor)
        self.mu = np.full((n_classes, dim), float(mu0))
        self.sigma2 = np.full((n_classes, dim), float(sigma2_0))
        self.class_counts = np.zeros(n_classes, dtype=np.int64)
        self.prior_mode = PriorMode(prior_mode)
        self.variance_floor = float(variance_floor)

    @classmethod
    def from_arrays(cls, mu, sigma2, class_counts, prior_mode=PriorMode.UNIFORM, variance_floor=1e-9):
        """Build a model around existing arrays without copying them.

        Ensembles use this to hand out per-base views of shared storage.
        """
        self = cls.__new__(cls)
        if mu.ndim != 2 or mu.shape != sigma2.shape or class_counts.shape != mu.shape[:1]:
            raise InvalidDimensionError("inconsistent moment array shapes")
        _check_params(mu.shape[0], mu.shape[1], 1.0, variance_floor)
        self.mu = mu
        self.sigma2 = sigma2
        self.class_counts = class_counts
        self.prior_mode = PriorMode(prior_mode)
        self.variance_floor = float(variance_floor)
        return self

    @property
    def n_classes(self) -> int:
        return self.mu.shape[0]

    @property
    def dim(self) -> int:
        return self.mu.shape[1]

    def _check_class(self, m):
        if not (isinstance(m, (int, np.integer)) and 0 <= m < self.n_classes):
            raise InvalidClassError(f"class index must be in [0, {self.n_classes}), got {m!r}")

    def _as_vector(self, z):
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 1 or z.shape[0] != self.dim:
            raise InvalidDimensionError(f"expected a vector of length {self.dim}, got shape {z.shape}")
        return z

    def log_priors(self) -> np.ndarray:
        return log_prior(self.class_counts, self.prior_mode)

    def log_posteriors(self, z) -> np.ndarray:
        """Unnormalized log posterior of every class for ``z``."""
        z = self._as_vector(z)
        return self.log_priors() + gaussian_log_likelihood(z, self.mu, self.sigma2, self.variance_floor)

    def log_posterior(self, z, m: int) -> float:
        self._check_class(m)
        z = self._as_vector(z)
        ll = gaussian_log_likelihood(z, self.mu[m], self.sigma2[m], self.variance_floor)
        return float(self.log_priors()[m] + ll)

    def update_batch(self, m: int, Z) -> None:
        """Merge a non-empty batch of class-``m`` rows into the moments."""
        self._check_class(m)
        Z = np.asarray(Z, dtype=np.float64)
        if Z.ndim != 2 or Z.shape[0] == 0:
            raise InvalidBatchError("update batch must be a non-empty 2-D array")
        if Z.shape[1] != self.dim:
            raise InvalidDimensionError(f"batch has {Z.shape[1]} columns, expected {self.dim}")
        self.mu[m], self.sigma2[m] = merge_moments(self.mu[m], self.sigma2[m], int(self.class_counts[m]), Z)
        self.class_counts[m] += Z.shape[0]

    def update_one(self, m: int, z) -> None:
        self._check_class(m)
        z = self._as_vector(z)
        t = int(self.class_counts[m]) + 1
        self.mu[m], self.sigma2[m] = step_moments(self.mu[m], self.sigma2[m], t, z)
        self.class_counts[m] = t

    def to_dict(self) -> dict:
        return {
            "M": self.n_classes,
            "q": self.dim,
            "prior_mode": self.prior_mode.value,
            "variance_floor": self.variance_floor,
            "class_counts": [int(c) for c in self.class_counts],
            "stats": [
                [[float(mu), float(s2)] for mu, s2 in zip(mu_row, s2_row)]
                for mu_row, s2_row in zip(self.mu, self.sigma2)
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GnbModel":
        stats = np.asarray(doc["stats"], dtype=np.float64)
        M, q = int(doc["M"]), int(doc["q"])
        if stats.shape != (M, q, 2) or len(doc["class_counts"]) != M:
            raise InvalidDimensionError("snapshot stats do not match M x q")
        return cls.from_arrays(
            stats[:, :, 0].copy(),
            stats[:, :, 1].copy(),
            np.asarray(doc["class_counts"], dtype=np.int64),
            doc["prior_mode"],
            doc["variance_floor"],
        )


def _check_params(n_classes, dim, sigma2_0, variance_floor):
    if n_classes < 2:
        raise InvalidParameterError(f"need at least 2 classes, got {n_classes}")
    if dim < 1:
        raise InvalidParameterError(f"dimension must be positive, got {dim}")
    if not sigma2_0 > 0:
        raise InvalidParameterError(f"initial variance must be positive, got {sigma2_0}")
    if not variance_floor > 0:
        raise InvalidParameterError(f"variance floor must be positive, got {variance_floor}")
