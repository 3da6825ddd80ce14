"""Datasets: synthetic generators, CSV loading and the bundled UCI tables."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .optimizer import Bounds

__all__ = [
    "Dataset",
    "DataError",
    "ARTSET1_MEANS",
    "ARTSET1_VARIANCES",
    "ARTSET2_RANGES",
    "UCI_DATASETS",
    "DATASET_NAMES",
    "generate_artset1",
    "generate_artset2",
    "load_csv",
    "load_uci",
    "load_dataset",
    "bounding_hyperbox",
    "write_csv",
]


class DataError(ValueError):
    """Malformed or unreadable dataset."""


@dataclass
class Dataset:
    points: np.ndarray
    labels: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise DataError("points must be a 2-d array")
        if not np.all(np.isfinite(self.points)):
            raise DataError("points must be finite")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (self.points.shape[0],):
                raise DataError("labels must have one entry per point")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> Optional[int]:
        if self.labels is None:
            return None
        return int(np.unique(self.labels).size)


ARTSET1_MEANS = np.array([[1, 1], [5, 15], [15, -5], [10, 10], [20, 20], [25, -7]], dtype=float)
ARTSET1_VARIANCES = np.array([1.0, 1.2, 1.5, 1.0, 1.0, 2.0])
ARTSET2_RANGES = [(85, 100), (70, 85), (55, 70), (40, 55), (25, 40)]


def _rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def generate_artset1(rng=0, per_class: int = 100) -> Dataset:
    """Six isotropic bivariate normal classes, ``per_class`` points each."""
    rng = _rng(rng)
    blocks, labels = [], []
    for c, (mu, var) in enumerate(zip(ARTSET1_MEANS, ARTSET1_VARIANCES)):
        blocks.append(rng.normal(mu, np.sqrt(var), size=(per_class, 2)))
        labels.append(np.full(per_class, c))
    return Dataset(np.vstack(blocks), np.concatenate(labels), "artset1")


def generate_artset2(rng=0, per_class: int = 50) -> Dataset:
    """Five classes uniform on disjoint cubes along the diagonal, in 3-d."""
    rng = _rng(rng)
    blocks, labels = [], []
    for c, (lo, hi) in enumerate(ARTSET2_RANGES):
        blocks.append(rng.uniform(lo, hi, size=(per_class, 3)))
        labels.append(np.full(per_class, c))
    return Dataset(np.vstack(blocks), np.concatenate(labels), "artset2")


def load_csv(
    path,
    label_column: Union[int, str, None] = None,
    header: bool = False,
    missing: Optional[str] = "?",
    name: Optional[str] = None,
) -> Dataset:
    """
    Read a comma-separated numeric table.

    Parameters
    ----------
    path : path-like
    label_column : int or str, optional
        0-based index of the class column, or its name when ``header`` is set.
        Class values are mapped to 0..K-1 in order of first appearance.
    header : bool, default False
        Whether the first line holds column names.
    missing : str or None, default "?"
        Rows containing this token in any field are dropped.
    name : str, optional
        Dataset name; defaults to the file stem.

    Raises
    ------
    DataError
        On a missing file, ragged rows or non-numeric features. Messages give
        the 1-based line number.
    """
    path = Path(path)
    try:
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e

    start = 0
    columns = None
    if header:
        if not rows:
            raise DataError(f"{path}: empty file")
        columns = [c.strip() for c in rows[0]]
        start = 1
    if isinstance(label_column, str):
        if columns is None:
            raise DataError("label column given by name requires a header")
        try:
            label_column = columns.index(label_column)
        except ValueError:
            raise DataError(f"{path}: no column named {label_column!r}") from None

    width = None
    feats, raw_labels = [], []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if not row or all(not c.strip() for c in row):
            continue
        cells = [c.strip() for c in row]
        if width is None:
            width = len(cells)
            if columns is not None and len(columns) != width:
                raise DataError(f"{path}: line {lineno} has {width} fields, header has {len(columns)}")
            if label_column is not None and not -width <= label_column < width:
                raise DataError(f"{path}: label column {label_column} out of range")
        elif len(cells) != width:
            raise DataError(f"{path}: line {lineno} has {len(cells)} fields, expected {width}")
        if missing is not None and missing in cells:
            continue
        lab = None
        if label_column is not None:
            lab = cells.pop(label_column % width)
        try:
            feats.append([float(c) for c in cells])
        except ValueError:
            raise DataError(f"{path}: non-numeric feature on line {lineno}") from None
        raw_labels.append(lab)

    if not feats:
        raise DataError(f"{path}: no data rows")
    labels = None
    if label_column is not None:
        mapping = {}
        labels = np.array([mapping.setdefault(v, len(mapping)) for v in raw_labels])
    pts = np.array(feats)
    if not np.all(np.isfinite(pts)):
        raise DataError(f"{path}: non-finite feature values")
    return Dataset(pts, labels, name or path.stem)


# name -> (file, label column, K)
UCI_DATASETS = {
    "iris": ("iris.csv", "class", 3),
    "wine": ("wine.csv", "class", 3),
    "glass": ("glass.csv", "type", 6),
    "cmc": ("cmc.csv", "method", 3),
    "cancer": ("cancer.csv", "class", 2),
}
DATASET_NAMES = ("artset1", "artset2", *UCI_DATASETS)


def load_uci(name: str) -> Dataset:
    """Load one of the bundled UCI tables (iris, wine, glass, cmc, cancer)."""
    try:
        fname, label, _ = UCI_DATASETS[name]
    except KeyError:
        raise DataError(f"unknown dataset {name!r}") from None
    ref = resources.files("hkaclust") / "datasets" / fname
    with resources.as_file(ref) as p:
        return load_csv(p, label_column=label, header=True, name=name)


def load_dataset(name: str, seed=0) -> Dataset:
    """Bundled or generated dataset by name. ``seed`` only affects the generators."""
    if name == "artset1":
        return generate_artset1(seed)
    if name == "artset2":
        return generate_artset2(seed)
    return load_uci(name)


def bounding_hyperbox(data) -> Bounds:
    x = np.asarray(getattr(data, "points", data), dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError("need at least one point")
    return Bounds(x.min(axis=0), x.max(axis=0))


def write_csv(data: Dataset, path) -> None:
    """Write features (and a trailing ``label`` column when present) with a header."""
    cols = [f"x{i}" for i in range(data.d)]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(cols + (["label"] if data.labels is not None else []))
        for i, row in enumerate(data.points):
            cells = [repr(float(v)) for v in row]
            if data.labels is not None:
                cells.append(str(int(data.labels[i])))
            w.writerow(cells)
