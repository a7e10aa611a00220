"""Multiclass linear online learners used as comparison points.

All three keep one weight row per class and score ``W @ x``:

* ``perceptron``: on a mistake, add ``x`` to the true row and subtract it
  from the predicted row.
* ``pa``: basic passive-aggressive step on the multiclass hinge loss
  against the highest-scoring wrong class, ``tau = loss / (2 |x|^2)``.
* ``ogd``: the same hinge subgradient with step ``eta0 / sqrt(t)``.
"""

from __future__ import annotations

import enum
import math
from typing import Optional

import numpy as np

from .base import Prediction, argmax_first
from .errors import InvalidClassError, InvalidDimensionError, InvalidParameterError


class Algorithm(str, enum.Enum):
    PERCEPTRON = "perceptron"
    PA = "pa"
    OGD = "ogd"


class LinearModel:
    batch_size = None

    def __init__(self, n_features: int, n_classes: int, algorithm=Algorithm.PERCEPTRON, eta0: float = 1.0):
        if n_features < 1 or n_classes < 2:
            raise InvalidParameterError("need n_features >= 1 and n_classes >= 2")
        if not eta0 > 0:
            raise InvalidParameterError(f"eta0 must be positive, got {eta0}")
        self.algorithm = Algorithm(algorithm)
        self.eta0 = float(eta0)
        self.W = np.zeros((n_classes, n_features))
        self.step_counter = 0
        self.update_count = 0
        self.seen_count = 0

    @property
    def name(self) -> str:
        return self.algorithm.value

    @property
    def n_classes(self) -> int:
        return self.W.shape[0]

    def predict(self, x) -> Prediction:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.W.shape[1]:
            raise InvalidDimensionError(f"expected a vector of length {self.W.shape[1]}, got shape {x.shape}")
        scores = self.W @ x
        return Prediction(argmax_first(scores), scores)

    def learn_one(self, x, y, prediction: Optional[Prediction] = None) -> Prediction:
        if not (isinstance(y, (int, np.integer)) and 0 <= y < self.n_classes):
            raise InvalidClassError(f"class index must be in [0, {self.n_classes}), got {y!r}")
        x = np.asarray(x, dtype=np.float64)
        if prediction is None:
            prediction = self.predict(x)
        self.seen_count += 1

        if self.algorithm is Algorithm.PERCEPTRON:
            if prediction.label != y:
                self.W[y] += x
                self.W[prediction.label] -= x
                self.update_count += 1
            return prediction

        if self.algorithm is Algorithm.OGD:
            self.step_counter += 1
        scores = prediction.scores
        rival = argmax_first(np.where(np.arange(self.n_classes) == y, -np.inf, scores))
        loss = max(0.0, 1.0 - (scores[y] - scores[rival]))
        if loss > 0:
            if self.algorithm is Algorithm.PA:
                sq_norm = float(x @ x)
                step = loss / (2.0 * sq_norm) if sq_norm > 0 else 0.0
            else:
                step = self.eta0 / math.sqrt(self.step_counter)
            self.W[y] += step * x
            self.W[rival] -= step * x
            self.update_count += 1
        return prediction
