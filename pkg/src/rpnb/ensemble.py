"""Random-projection Naive Bayes ensemble.

``K`` Gaussian Naive Bayes bases each see the input through their own
random projection.  Per-class log posteriors are summed over bases (Sum
rule) or the bases vote.  Parameters change only on misclassified
observations: one at a time in ``1b1`` mode, or per mini-batch, grouped by
true class, in ``minibatch`` mode.

All bases share one set of stacked arrays (``K x M x q``) so updates and
scoring are vectorized over ``K``; ``model.bases[k]`` is a
:class:`~rpnb.gnb.GnbModel` view into that storage.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .base import Prediction, argmax_first
from .data import down_dim
from .errors import (
    InvalidBatchError,
    InvalidClassError,
    InvalidDimensionError,
    InvalidParameterError,
)
from .gnb import (
    GnbModel,
    PriorMode,
    gaussian_log_likelihood,
    log_prior,
    merge_moments,
    step_moments,
)
from .projection import ProjectionScheme, generate_matrix


class Combiner(str, enum.Enum):
    SUM = "sum"
    VOTE = "vote"


class Mode(str, enum.Enum):
    ONE_BY_ONE = "1b1"
    MINI_BATCH = "minibatch"


@dataclass(frozen=True)
class RpnbConfig:
    """Ensemble settings.

    ``q=None`` resolves to :func:`rpnb.data.down_dim` of the input
    dimension when the model is built.  ``update_always`` disables
    misclassification gating and exists only for testing.
    """

    k: int = 200
    q: Optional[int] = None
    scheme: ProjectionScheme = ProjectionScheme.GAUSSIAN
    combiner: Combiner = Combiner.SUM
    mode: Mode = Mode.ONE_BY_ONE
    batch_size: int = 1
    seed: int = 0
    mu0: float = 0.0
    sigma2_0: float = 1.0
    prior_mode: PriorMode = PriorMode.UNIFORM
    variance_floor: float = 1e-9
    update_always: bool = False

    def __post_init__(self):
        try:
            for name, kind in (
                ("scheme", ProjectionScheme),
                ("combiner", Combiner),
                ("mode", Mode),
                ("prior_mode", PriorMode),
            ):
                object.__setattr__(self, name, kind(getattr(self, name)))
        except ValueError as exc:
            raise InvalidParameterError(str(exc)) from None
        if self.k < 1:
            raise InvalidParameterError(f"ensemble size must be >= 1, got {self.k}")
        if self.q is not None and self.q < 1:
            raise InvalidParameterError(f"down-space dimension must be >= 1, got {self.q}")
        if self.batch_size < 1:
            raise InvalidParameterError(f"batch size must be >= 1, got {self.batch_size}")
        if not self.sigma2_0 > 0 or not self.variance_floor > 0:
            raise InvalidParameterError("initial variance and variance floor must be positive")
        if self.seed < 0 or self.seed + self.k > 2**64:
            raise InvalidParameterError("seed + k must fit in a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        doc = asdict(self)
        for key, value in doc.items():
            if isinstance(value, enum.Enum):
                doc[key] = value.value
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "RpnbConfig":
        return cls(**doc)


class RpnbModel:
    """The ensemble classifier for ``p``-dimensional inputs and ``M`` classes.

    ``matrices`` overrides the seeded generation with explicit
    :class:`~rpnb.projection.ProjectionMatrix` objects (``config.k`` of them,
    all ``p x q``); it exists for hand-built cases.
    """

    name = "rpnb"

    def __init__(self, config: RpnbConfig, p: int, n_classes: int, matrices=None):
        if p < 1:
            raise InvalidParameterError(f"input dimension must be positive, got {p}")
        if n_classes < 2:
            raise InvalidParameterError(f"need at least 2 classes, got {n_classes}")
        self.config = config
        self.p = p
        self.n_classes = n_classes
        self.q = config.q if config.q is not None else down_dim(p)
        K, M, q = config.k, n_classes, self.q

        if matrices is None:
            matrices = [generate_matrix(p, q, config.scheme, config.seed + k) for k in range(K)]
        elif len(matrices) != K or any((m.p, m.q) != (p, q) for m in matrices):
            raise InvalidParameterError(f"need {K} matrices of shape {p} x {q}")
        self.matrices = list(matrices)
        self._stacked = np.hstack([m.entries for m in self.matrices])
        self._scale = math.sqrt(q)

        self._mu = np.full((K, M, q), float(config.mu0))
        self._sigma2 = np.full((K, M, q), float(config.sigma2_0))
        self._counts = np.zeros((K, M), dtype=np.int64)
        self.bases = [
            GnbModel.from_arrays(
                self._mu[k], self._sigma2[k], self._counts[k], config.prior_mode, config.variance_floor
            )
            for k in range(K)
        ]
        self.update_count = 0
        self.seen_count = 0

    @property
    def batch_size(self) -> Optional[int]:
        return self.config.batch_size if self.config.mode is Mode.MINI_BATCH else None

    def _check_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.p:
            raise InvalidDimensionError(f"expected a vector of length {self.p}, got shape {x.shape}")
        return x

    def _check_y(self, y) -> int:
        if not (isinstance(y, (int, np.integer)) and 0 <= y < self.n_classes):
            raise InvalidClassError(f"class index must be in [0, {self.n_classes}), got {y!r}")
        return int(y)

    def project(self, x) -> np.ndarray:
        """Down-space images of ``x`` under every matrix, shape ``(K, q)``."""
        x = self._check_x(x)
        return ((x @ self._stacked) / self._scale).reshape(self.config.k, self.q)

    def base_scores(self, x) -> np.ndarray:
        """Per-base log posteriors, shape ``(K, M)``."""
        Z = self.project(x)
        ll = gaussian_log_likelihood(Z[:, None, :], self._mu, self._sigma2, self.config.variance_floor)
        return log_prior(self._counts, self.config.prior_mode) + ll

    def predict(self, x) -> Prediction:
        per_base = self.base_scores(x)
        if self.config.combiner is Combiner.SUM:
            # axis-0 reduction on a C-ordered array accumulates bases in order
            scores = per_base.sum(axis=0)
        else:
            votes = np.argmax(per_base, axis=1)
            scores = np.bincount(votes, minlength=self.n_classes).astype(np.float64)
        return Prediction(argmax_first(scores), scores)

    def predict_batch(self, X) -> list[Prediction]:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.p:
            raise InvalidDimensionError(f"expected an n x {self.p} matrix, got shape {X.shape}")
        return [self.predict(row) for row in X]

    def learn_one(self, x, y, prediction: Optional[Prediction] = None) -> Prediction:
        """Predict ``x``, then update class ``y`` in every base if it was wrong."""
        if self.config.mode is not Mode.ONE_BY_ONE:
            raise InvalidParameterError("learn_one requires mode '1b1'")
        y = self._check_y(y)
        x = self._check_x(x)
        if prediction is None:
            prediction = self.predict(x)
        self.seen_count += 1
        if prediction.label != y or self.config.update_always:
            Z = self.project(x)
            t = int(self._counts[0, y]) + 1
            self._mu[:, y], self._sigma2[:, y] = step_moments(self._mu[:, y], self._sigma2[:, y], t, Z)
            self._counts[:, y] = t
            self.update_count += 1
        return prediction

    def learn_batch(self, X, y, predictions: Optional[list[Prediction]] = None) -> list[Prediction]:
        """Predict every row with the current model, then update per true class."""
        if self.config.mode is not Mode.MINI_BATCH:
            raise InvalidParameterError("learn_batch requires mode 'minibatch'")
        X = np.asarray(X, dtype=np.float64)
        y = [self._check_y(v) for v in y]
        if X.ndim != 2 or X.shape[0] != len(y):
            raise InvalidBatchError(f"X has {X.shape[0] if X.ndim else 0} rows but y has {len(y)} labels")
        if not y:
            raise InvalidBatchError("empty mini-batch")
        if predictions is None:
            predictions = self.predict_batch(X)
        elif len(predictions) != len(y):
            raise InvalidBatchError("predictions and labels differ in length")
        self.seen_count += len(y)

        wrong = [i for i, (pred, label) in enumerate(zip(predictions, y))
                 if pred.label != label or self.config.update_always]
        for m in range(self.n_classes):
            rows = [i for i in wrong if y[i] == m]
            if not rows:
                continue
            Z = np.stack([self.project(X[i]) for i in rows], axis=1)  # (K, n_m, q)
            count = int(self._counts[0, m])
            self._mu[:, m], self._sigma2[:, m] = merge_moments(self._mu[:, m], self._sigma2[:, m], count, Z)
            self._counts[:, m] += len(rows)
        self.update_count += len(wrong)
        return predictions

    def to_dict(self) -> dict:
        """JSON-ready snapshot; matrices are regenerated from the seed on load."""
        return {
            "config": self.config.to_dict(),
            "p": self.p,
            "M": self.n_classes,
            "seed": self.config.seed,
            "update_count": self.update_count,
            "seen_count": self.seen_count,
            "bases": [b.to_dict() for b in self.bases],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RpnbModel":
        model = cls(RpnbConfig.from_dict(doc["config"]), int(doc["p"]), int(doc["M"]))
        if len(doc["bases"]) != model.config.k:
            raise InvalidDimensionError("snapshot base count does not match k")
        for k, base_doc in enumerate(doc["bases"]):
            base = GnbModel.from_dict(base_doc)
            if base.mu.shape != model._mu[k].shape:
                raise InvalidDimensionError("snapshot base shape does not match (M, q)")
            model._mu[k] = base.mu
            model._sigma2[k] = base.sigma2
            model._counts[k] = base.class_counts
        model.update_count = int(doc["update_count"])
        model.seen_count = int(doc["seen_count"])
        return model
