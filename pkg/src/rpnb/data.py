"""Datasets: CSV ingestion, built-in fixtures, the GM generator, helpers.

CSV layout: comma separated, UTF-8, optional single header row, the last
column is the label (any string), every other column a decimal real.
Labels are encoded in order of first appearance.  Features are not scaled.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from .errors import InvalidDatasetError, ParseError
from .projection import make_rng

BUILTIN_DATASETS = ("iris", "breast_cancer", "gm")

GM_SIZES = (334, 333, 333)
GM_MEANS = (0.5, 0.0, -0.5)
GM_STDS = (1.0, 2.0, 3.0)
GM_DIM = 1000


@dataclass(frozen=True, eq=False)
class Dataset:
    name: str
    X: np.ndarray
    y: np.ndarray
    label_names: list = field(default_factory=list)

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise InvalidDatasetError("X must be n x p with one label per row")
        if self.X.shape[0] < 1:
            raise InvalidDatasetError("dataset has no observations")
        if self.n_classes < 2:
            raise InvalidDatasetError(f"dataset {self.name!r} has fewer than 2 classes")
        if self.y.min() < 0 or self.y.max() >= self.n_classes:
            raise InvalidDatasetError("label indices out of range")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.label_names)


def _looks_numeric(cells) -> bool:
    try:
        [float(c) for c in cells]
    except ValueError:
        return False
    return True


def load_csv(path, has_header: Optional[bool] = None, name: Optional[str] = None) -> Dataset:
    """Read a CSV file whose last column holds the labels.

    ``has_header=None`` treats the first row as a header when any of its
    feature cells fails to parse as a number.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if name is None:
        name = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    if rows and (has_header or (has_header is None and not _looks_numeric(rows[0][:-1]))):
        start = 1
    else:
        start = 0

    body = rows[start:]
    if not body:
        raise InvalidDatasetError(f"{path}: no data rows")
    width = len(body[0])
    if width < 2:
        raise ParseError(f"{path}: need at least one feature column and a label column", row=start + 1)

    X = np.empty((len(body), width - 1))
    codes: dict[str, int] = {}
    y = np.empty(len(body), dtype=np.int64)
    for i, row in enumerate(body):
        line = start + i + 1
        if len(row) != width:
            raise ParseError(f"{path}: row {line} has {len(row)} columns, expected {width}", row=line)
        for j, cell in enumerate(row[:-1]):
            try:
                value = float(cell)
            except ValueError:
                value = math.nan
            if not math.isfinite(value):
                raise ParseError(
                    f"{path}: row {line}, column {j + 1}: cannot parse {cell!r} as a finite number",
                    row=line, column=j + 1,
                )
            X[i, j] = value
        label = row[-1].strip()
        y[i] = codes.setdefault(label, len(codes))

    if len(codes) < 2:
        raise InvalidDatasetError(f"{path}: only one class present")
    return Dataset(name, X, y, list(codes))


def write_csv(dataset: Dataset, path, header: bool = True) -> None:
    """Write ``dataset`` in the format :func:`load_csv` reads.

    Floats use Python's shortest round-trip repr, so reloading is exact.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow([f"x{j}" for j in range(dataset.p)] + ["label"])
        for row, label in zip(dataset.X, dataset.y):
            writer.writerow([repr(float(v)) for v in row] + [dataset.label_names[label]])


def generate_gm(seed: int = 0) -> Dataset:
    """The 3-component, 1000-dimensional Gaussian mixture (n = 1000).

    Component ``c`` has every coordinate drawn as ``mean_c + std_c * N(0, 1)``
    with means (0.5, 0, -0.5) and standard deviations (1, 2, 3).  Rows come
    out component by component.
    """
    rng = make_rng(seed)
    blocks = [
        mean + std * rng.standard_normal((size, GM_DIM))
        for size, mean, std in zip(GM_SIZES, GM_MEANS, GM_STDS)
    ]
    y = np.repeat(np.arange(len(GM_SIZES)), GM_SIZES)
    return Dataset("gm", np.vstack(blocks), y, [str(c) for c in range(len(GM_SIZES))])


def load_builtin(name: str, seed: int = 0) -> Dataset:
    """Load a bundled dataset: ``iris``, ``breast_cancer`` or ``gm``.

    ``seed`` only affects ``gm``.
    """
    if name == "gm":
        return generate_gm(seed)
    if name not in BUILTIN_DATASETS:
        raise InvalidDatasetError(f"unknown built-in dataset {name!r}")
    with resources.as_file(resources.files("rpnb.datasets") / f"{name}.csv") as path:
        return load_csv(path, has_header=True, name=name)


def down_dim(p: int) -> int:
    """Down-space dimension for ``p`` features: ``p`` below 5, else ``ceil(2 log2 p)``."""
    if p < 1:
        raise InvalidDatasetError(f"p must be positive, got {p}")
    if p < 5:
        return p
    return math.ceil(2.0 * math.log2(p))


def permutation(n: int, seed: int) -> np.ndarray:
    """Uniform random ordering of ``0..n-1`` (Fisher-Yates via numpy)."""
    if n < 1:
        raise InvalidDatasetError(f"n must be positive, got {n}")
    return make_rng(seed).permutation(n)
