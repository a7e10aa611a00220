"""Shared learner types."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np


@dataclass
class Prediction:
    """Predicted class index plus the per-class scores it was chosen from."""

    label: int
    scores: np.ndarray


def argmax_first(scores) -> int:
    """Index of the maximum; ties go to the smallest index."""
    return int(np.argmax(scores))


class OnlineLearner(Protocol):
    """What the prequential harness needs from a learner.

    ``learn_one`` accepts the prediction the harness already obtained so the
    learner does not have to recompute it.  Mini-batch learners additionally
    expose a non-None ``batch_size`` together with ``predict_batch`` and
    ``learn_batch``.
    """

    name: str
    update_count: int
    seen_count: int

    def predict(self, x) -> Prediction: ...

    def learn_one(self, x, y: int, prediction: Optional[Prediction] = None) -> Prediction: ...


class MiniBatchLearner(OnlineLearner, Protocol):
    batch_size: Optional[int]

    def predict_batch(self, X) -> list[Prediction]: ...

    def learn_batch(self, X, y: Sequence[int], predictions: Optional[list[Prediction]] = None) -> list[Prediction]: ...
