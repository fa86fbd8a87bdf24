"""Tabular classification data: loading, label encoding, stratified splits and folds."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DatasetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    """Numeric attribute matrix with dense class labels.

    ``row_ids`` keeps the position of each row in the originating file so
    that subsets produced by splitting stay traceable.
    """

    features: np.ndarray
    labels: np.ndarray
    attribute_names: tuple[str, ...]
    class_names: tuple[str, ...]
    row_ids: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise DatasetError("features must be a 2-D matrix")
        y = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if len(y) != X.shape[0]:
            raise DatasetError(f"{X.shape[0]} rows but {len(y)} labels")
        if X.shape[1] < 1:
            raise DatasetError("dataset needs at least one attribute")
        if not np.all(np.isfinite(X)):
            raise DatasetError("features contain NaN or infinite values")
        if len(self.attribute_names) != X.shape[1]:
            raise DatasetError("attribute_names length does not match arity")
        if len(y) and (y.min() < 0 or y.max() >= len(self.class_names)):
            raise DatasetError("label outside 0..C-1")
        ids = np.arange(len(y)) if self.row_ids is None else np.asarray(self.row_ids, dtype=np.int64)
        X.setflags(write=False)
        y.setflags(write=False)
        ids.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "row_ids", ids)
        object.__setattr__(self, "attribute_names", tuple(self.attribute_names))
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, idx) -> "Dataset":
        """Rows ``idx`` as a new dataset; class names are kept even if a class goes missing."""
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.attribute_names,
                       self.class_names, self.row_ids[idx])

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.attribute_names == other.attribute_names
                and self.class_names == other.class_names
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels)
                and np.array_equal(self.row_ids, other.row_ids))

    def __repr__(self):
        return (f"Dataset(rows={self.n_rows}, attributes={self.n_attributes}, "
                f"classes={self.n_classes})")


@dataclass(frozen=True)
class SplitPair:
    first: Dataset
    second: Dataset
    seed: int
    first_index: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]
    second_index: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]


def _resolve_column(selector, header: list[str] | None, width: int) -> int:
    if isinstance(selector, str):
        try:
            return int(selector) % width
        except ValueError:
            pass
        if header is None or selector not in header:
            raise DatasetError(f"unknown column {selector!r}")
        return header.index(selector)
    if not -width <= selector < width:
        raise DatasetError(f"column index {selector} out of range for {width} columns")
    return selector % width


def load_csv(path, label_column: int | str = -1, has_header: bool = True,
             drop_columns: Sequence[int | str] = ()) -> Dataset:
    """Read a comma-separated file into a :class:`Dataset`.

    Labels are encoded as dense indices in order of first appearance. Every
    other (non-dropped) column must parse as a real number; empty cells are
    rejected.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    header = None
    start = 1 if has_header else 0
    if has_header:
        if not rows:
            raise DatasetError(f"{path}: empty file")
        header = [h.strip() for h in rows[0]]
    body = rows[start:]
    if not body:
        raise DatasetError(f"{path}: empty dataset (no data rows)")
    width = len(header) if header is not None else len(body[0])
    for i, r in enumerate(body):
        if len(r) != width:
            raise DatasetError(f"{path}: ragged row {i + start + 1}: "
                               f"expected {width} cells, got {len(r)}")
    label_idx = _resolve_column(label_column, header, width)
    dropped = {_resolve_column(c, header, width) for c in drop_columns}
    if label_idx in dropped:
        raise DatasetError("label column cannot be dropped")
    keep = [j for j in range(width) if j != label_idx and j not in dropped]
    if not keep:
        raise DatasetError("no attribute columns left")

    X = np.empty((len(body), len(keep)))
    class_index: dict[str, int] = {}
    y = np.empty(len(body), dtype=np.int64)
    for i, r in enumerate(body):
        for out_j, j in enumerate(keep):
            cell = r[j].strip()
            try:
                X[i, out_j] = float(cell)
            except ValueError:
                raise DatasetError(f"{path}: row {i + start + 1}, column {j + 1}: "
                                   f"cannot parse {cell!r} as a number") from None
        lab = r[label_idx].strip()
        if not lab:
            raise DatasetError(f"{path}: row {i + start + 1}: empty label")
        y[i] = class_index.setdefault(lab, len(class_index))
    if not np.all(np.isfinite(X)):
        raise DatasetError(f"{path}: non-finite feature value")
    names = ([header[j] for j in keep] if header is not None
             else [f"attr{j}" for j in range(len(keep))])
    return Dataset(X, y, tuple(names), tuple(class_index))


def write_csv(ds: Dataset, path, label_name: str = "class") -> None:
    """Write ``ds`` with a header row and the label as the last column."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(ds.attribute_names) + [label_name])
        for row, lab in zip(ds.features, ds.labels):
            w.writerow([repr(float(v)) for v in row] + [ds.class_names[lab]])


def _largest_remainder(sizes: np.ndarray, fraction: float) -> np.ndarray:
    raw = sizes * fraction
    counts = np.floor(raw).astype(np.int64)
    short = int(round(float(raw.sum()))) - int(counts.sum())
    order = sorted(range(len(sizes)), key=lambda c: (-(raw[c] - counts[c]), c))
    for c in order[:max(short, 0)]:
        counts[c] += 1
    return counts


def stratified_split(ds: Dataset, fraction: float, seed: int) -> SplitPair:
    """Split rows into a ``fraction`` part and the remainder, class by class.

    Each class contributes its share (largest-remainder rounding) to the
    first part, clamped so both parts hold at least one of every class.
    """
    if not 0.0 < fraction < 1.0:
        raise DatasetError(f"fraction must be in (0, 1), got {fraction}")
    sizes = ds.class_counts()
    present = np.flatnonzero(sizes)
    if np.any(sizes[present] < 2):
        bad = [ds.class_names[c] for c in present if sizes[c] < 2]
        raise DatasetError(f"cannot stratify classes with a single member: {bad}")
    counts = np.clip(_largest_remainder(sizes, fraction), 1, np.maximum(sizes - 1, 1))
    rng = np.random.default_rng(seed)
    first, second = [], []
    for c in present:
        members = np.flatnonzero(ds.labels == c)
        members = members[rng.permutation(len(members))]
        first.append(members[:counts[c]])
        second.append(members[counts[c]:])
    a = np.sort(np.concatenate(first))
    b = np.sort(np.concatenate(second))
    return SplitPair(ds.subset(a), ds.subset(b), seed, a, b)


def stratified_kfold(ds: Dataset, folds: int, seed: int) -> list[SplitPair]:
    """Stratified k-fold: ``first`` is the training part, ``second`` the test fold.

    Members of each class are shuffled and dealt round-robin over the folds,
    continuing the deal across classes so fold sizes stay balanced.
    """
    if folds < 2:
        raise DatasetError("folds must be >= 2")
    if folds > ds.n_rows:
        raise DatasetError(f"folds={folds} exceeds the {ds.n_rows} rows")
    rng = np.random.default_rng(seed)
    assignment = np.empty(ds.n_rows, dtype=np.int64)
    dealt = 0
    for c in range(ds.n_classes):
        members = np.flatnonzero(ds.labels == c)
        members = members[rng.permutation(len(members))]
        assignment[members] = (dealt + np.arange(len(members))) % folds
        dealt += len(members)
    out = []
    for f in range(folds):
        test = np.flatnonzero(assignment == f)
        train = np.flatnonzero(assignment != f)
        out.append(SplitPair(ds.subset(train), ds.subset(test), seed, train, test))
    return out


def min_max_normalize(ds: Dataset) -> Dataset:
    """Map each column affinely onto [0, 1]; constant columns become 0."""
    X = ds.features
    lo = X.min(axis=0) if ds.n_rows else np.zeros(ds.n_attributes)
    span = (X.max(axis=0) - lo) if ds.n_rows else np.zeros(ds.n_attributes)
    safe = np.where(span > 0, span, 1.0)
    Z = np.where(span > 0, (X - lo) / safe, 0.0)
    return Dataset(Z, ds.labels, ds.attribute_names, ds.class_names, ds.row_ids)
