"""Prequential evaluation, metrics and paired significance testing."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .data import Dataset, permutation
from .errors import InsufficientDataError, InvalidDatasetError, InvalidInputError

EXACT_WILCOXON_MAX_N = 25


@dataclass
class RunSummary:
    dataset_name: str
    learner_name: str
    permutation_seed: int
    error_rate: float
    macro_f1: float
    update_count: int
    n_observations: int
    mistakes: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class MeanVar:
    mean: float
    var: float

    @classmethod
    def of(cls, values) -> "MeanVar":
        values = np.asarray(values, dtype=np.float64)
        return cls(float(values.mean()), float(values.var()))


@dataclass
class AggregateSummary:
    """Mean and population variance of each metric over permutations."""

    error_rate: MeanVar
    macro_f1: MeanVar
    update_count: MeanVar
    n_perms: int
    runs: list = field(default_factory=list)

    @classmethod
    def from_runs(cls, runs: Sequence[RunSummary]) -> "AggregateSummary":
        if not runs:
            raise InvalidInputError("cannot aggregate zero runs")
        return cls(
            MeanVar.of([r.error_rate for r in runs]),
            MeanVar.of([r.macro_f1 for r in runs]),
            MeanVar.of([r.update_count for r in runs]),
            len(runs),
            list(runs),
        )


@dataclass
class WilcoxonResult:
    n_effective: int
    statistic: float
    w_plus: float
    w_minus: float
    p_value: float
    reject: bool
    method: str


def macro_f1(confusion) -> float:
    """Unweighted mean of per-class F1; rows are true classes, columns predictions.

    Any 0/0 in precision, recall or F1 counts as 0.
    """
    C = np.asarray(confusion, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidInputError("confusion matrix must be square")
    if (C < 0).any() or C.sum() == 0:
        raise InvalidInputError("confusion matrix must be non-negative with at least one count")
    tp = np.diag(C)
    predicted = C.sum(axis=0)
    actual = C.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(predicted > 0, tp / predicted, 0.0)
        recall = np.where(actual > 0, tp / actual, 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2 * precision * recall / denom, 0.0)
    return float(f1.mean())


def prequential_run(learner, dataset: Dataset, order, permutation_seed: int = 0) -> RunSummary:
    """Stream ``dataset`` through ``learner`` in ``order``, test-then-train.

    The harness gets each prediction from ``predict``/``predict_batch``
    before the label is passed anywhere, and hands that prediction to the
    learning call.  Learners with a non-None ``batch_size`` receive
    consecutive chunks of that size (the last one may be short).
    """
    if dataset.n < 1:
        raise InvalidDatasetError("empty dataset")
    order = np.asarray(order, dtype=np.int64)
    if order.shape != (dataset.n,) or not np.array_equal(np.sort(order), np.arange(dataset.n)):
        raise InvalidInputError("order must be a permutation of 0..n-1")

    M = dataset.n_classes
    confusion = np.zeros((M, M), dtype=np.int64)
    batch_size = getattr(learner, "batch_size", None)
    step = batch_size or 1
    for start in range(0, dataset.n, step):
        idx = order[start:start + step]
        X, y = dataset.X[idx], dataset.y[idx]
        if batch_size:
            preds = learner.predict_batch(X)
            labels = [p.label for p in preds]
            learner.learn_batch(X, [int(v) for v in y], predictions=preds)
        else:
            pred = learner.predict(X[0])
            labels = [pred.label]
            learner.learn_one(X[0], int(y[0]), prediction=pred)
        for true, guess in zip(y, labels):
            confusion[true, guess] += 1

    mistakes = int(dataset.n - np.trace(confusion))
    return RunSummary(
        dataset_name=dataset.name,
        learner_name=learner.name,
        permutation_seed=int(permutation_seed),
        error_rate=mistakes / dataset.n,
        macro_f1=macro_f1(confusion),
        update_count=int(learner.update_count),
        n_observations=dataset.n,
        mistakes=mistakes,
    )


def averaged_eval(
    learner_factory: Callable[[Dataset], object],
    dataset: Dataset,
    n_perms: int = 10,
    base_seed: int = 0,
) -> AggregateSummary:
    """Run ``n_perms`` permutations (seed ``base_seed + i``), a fresh learner each."""
    if n_perms < 1:
        raise InvalidInputError(f"n_perms must be >= 1, got {n_perms}")
    runs = []
    for i in range(n_perms):
        seed = base_seed + i
        runs.append(prequential_run(learner_factory(dataset), dataset, permutation(dataset.n, seed), seed))
    return AggregateSummary.from_runs(runs)


def average_ranks(values) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    values = np.asarray(values)
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_lower_tail(ranks, statistic) -> float:
    """P(W+ <= statistic) under the null, over all 2^n sign assignments.

    Average ranks are multiples of 1/2, so doubling makes them integers and
    the distribution of W+ can be counted by polynomial multiplication.
    """
    doubled = np.rint(2 * ranks).astype(np.int64)
    counts = np.zeros(int(doubled.sum()) + 1, dtype=np.int64)
    counts[0] = 1
    top = 0
    for r in doubled:
        counts[r:top + r + 1] += counts[:top + 1].copy()
        top += r
    threshold = int(np.floor(2 * statistic + 1e-9))
    return float(counts[:threshold + 1].sum()) / float(2 ** len(ranks))


def wilcoxon_signed_rank(a, b, alpha: float = 0.05, method: str = "auto") -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped.  With ``method="auto"`` the p-value is
    exact up to 25 remaining pairs; beyond that a tie-corrected normal
    approximation with continuity correction is used.  ``"exact"`` and
    ``"normal"`` force one or the other.
    """
    if method not in ("auto", "exact", "normal"):
        raise InvalidInputError(f"unknown method {method!r}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidInputError("a and b must be 1-D sequences of equal length")
    d = a - b
    d = d[d != 0]
    n = len(d)
    if n < 3:
        raise InsufficientDataError(f"need at least 3 non-zero differences, got {n}")

    ranks = average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    statistic = min(w_plus, w_minus)

    if method == "auto":
        method = "exact" if n <= EXACT_WILCOXON_MAX_N else "normal"
    if method == "exact":
        p = min(1.0, 2.0 * _exact_lower_tail(ranks, statistic))
    else:
        mean = n * (n + 1) / 4.0
        _, tie_sizes = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24.0 - float((tie_sizes**3 - tie_sizes).sum()) / 48.0
        z = max(abs(w_plus - mean) - 0.5, 0.0) / math.sqrt(var)
        p = min(1.0, math.erfc(z / math.sqrt(2.0)))
    return WilcoxonResult(n, statistic, w_plus, w_minus, p, p < alpha, method)


def win_loss_count(errors_a, errors_b, rejected) -> tuple[int, int]:
    """Count datasets where the test rejected and ``a`` had lower (win) or higher (loss) error."""
    if not (len(errors_a) == len(errors_b) == len(rejected)):
        raise InvalidInputError("errors and rejection flags must be aligned")
    wins = sum(1 for ea, eb, r in zip(errors_a, errors_b, rejected) if r and ea < eb)
    losses = sum(1 for ea, eb, r in zip(errors_a, errors_b, rejected) if r and ea > eb)
    return wins, losses
