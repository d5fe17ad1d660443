"""Datasets: synthetic hypercube blobs, bundled Iris, balanced subsets and CSV I/O."""

from __future__ import annotations

import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ._random import make_rng


class DatasetFormatError(ValueError):
    """Raised when a dataset CSV file cannot be parsed."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """N points in d dimensions with optional integer class labels.

    Arrays are copied and made read-only on construction.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got shape {pts.shape}")
        n, d = pts.shape
        if n < 2 or d < 1:
            raise ValueError(f"need at least 2 points and 1 feature, got N={n}, d={d}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("all coordinates must be finite")
        object.__setattr__(self, "points", _frozen(pts))

        if self.labels is not None:
            raw = np.asarray(self.labels)
            lab = raw.astype(np.int64)
            if lab.shape != (n,) or not np.array_equal(lab, raw):
                raise ValueError("labels must be a length-N vector of integers")
            if lab.min() < 0:
                raise ValueError("labels must be non-negative")
            counts = np.bincount(lab)
            if np.any(counts == 0):
                missing = np.flatnonzero(counts == 0).tolist()
                raise ValueError(f"label classes {missing} are empty")
            object.__setattr__(self, "labels", _frozen(lab))

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_features(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> int:
        """Number of ground-truth classes, 0 if unlabeled."""
        return 0 if self.labels is None else int(self.labels.max()) + 1

    def class_sizes(self) -> list[int]:
        if self.labels is None:
            return []
        return np.bincount(self.labels).tolist()

    def equals(self, other: "Dataset") -> bool:
        """Compare points and labels exactly (the name is ignored)."""
        if not np.array_equal(self.points, other.points):
            return False
        if self.labels is None or other.labels is None:
            return self.labels is None and other.labels is None
        return np.array_equal(self.labels, other.labels)


@dataclass(frozen=True)
class SyntheticSpec:
    n_points: int
    n_clusters: int
    n_features: int
    side_length: float = 2.0
    std_dev: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for attr in ("n_points", "n_clusters", "n_features"):
            if int(getattr(self, attr)) < 1:
                raise ValueError(f"{attr} must be a positive integer")
        if self.n_points % self.n_clusters:
            raise ValueError(
                f"n_points={self.n_points} is not divisible by n_clusters={self.n_clusters}"
            )
        if self.n_clusters > 2**self.n_features:
            raise ValueError(
                f"a {self.n_features}-d hypercube has only {2**self.n_features} vertices; "
                f"cannot place {self.n_clusters} clusters"
            )
        if self.std_dev < 0 or self.side_length <= 0:
            raise ValueError("std_dev must be >= 0 and side_length > 0")


def hypercube_centers(n_clusters: int, n_features: int, side_length: float, rotation: int) -> np.ndarray:
    """Pick ``n_clusters`` distinct vertices of ``{-s/2, +s/2}^d``.

    Vertices are walked in reflected Gray-code order starting at position
    ``rotation``; bit ``m`` of the code word selects the sign of coordinate ``m``.
    """
    n_vertices = 1 << n_features
    half = side_length / 2.0
    centers = np.empty((n_clusters, n_features))
    for c in range(n_clusters):
        t = (rotation + c) % n_vertices
        gray = t ^ (t >> 1)
        for m in range(n_features):
            centers[c, m] = half if (gray >> m) & 1 else -half
    return centers


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Sample N/k isotropic Gaussian points about each of k hypercube vertices.

    The output is shuffled; a given spec always yields the same dataset.
    """
    n, k, d = spec.n_points, spec.n_clusters, spec.n_features
    rng = make_rng(spec.seed, 0x5EED)
    # rotation is drawn uniformly over [0, 2^d) from d random bits
    bits = rng.integers(0, 2, size=d)
    rotation = sum(int(b) << m for m, b in enumerate(bits))
    centers = hypercube_centers(k, d, spec.side_length, rotation)

    labels = np.repeat(np.arange(k), n // k)
    points = centers[labels] + spec.std_dev * rng.standard_normal((n, d))
    order = rng.permutation(n)
    name = f"synthetic_N{n}_k{k}_d{d}_s{spec.seed}"
    return Dataset(points[order], labels[order], name)


def load_iris() -> Dataset:
    """The 150-point, 4-feature Iris dataset bundled with the package."""
    text = resources.files("qbkmeans").joinpath("data/iris.csv").read_text(encoding="utf-8")
    return _parse_csv(io.StringIO(text), "iris")


def subset_balanced(ds: Dataset, n_points: int, k: int, seed: int) -> Dataset:
    """Draw ``n_points / k`` points without replacement from each of classes ``0..k-1``."""
    if ds.labels is None:
        raise ValueError("subset_balanced requires a labeled dataset")
    if k < 1 or k > ds.n_classes:
        raise ValueError(f"k={k} outside [1, {ds.n_classes}]")
    if n_points < 1 or n_points % k:
        raise ValueError(f"n_points={n_points} must be a positive multiple of k={k}")
    per_class = n_points // k
    sizes = ds.class_sizes()
    if per_class > min(sizes[:k]):
        raise ValueError(f"{per_class} points per class exceeds smallest class size {min(sizes[:k])}")

    rng = make_rng(seed, 0x5B5E7)
    chosen = []
    for c in range(k):
        members = np.flatnonzero(ds.labels == c)
        chosen.append(rng.choice(members, size=per_class, replace=False))
    idx = rng.permutation(np.concatenate(chosen))
    return Dataset(ds.points[idx], ds.labels[idx], f"{ds.name}_sub{n_points}_k{k}_s{seed}")


# --- CSV -------------------------------------------------------------------


def format_csv(ds: Dataset) -> str:
    """Render ``ds`` as CSV text: header ``x0,...,x{d-1}[,label]``, 17 significant digits."""
    header = [f"x{m}" for m in range(ds.n_features)]
    if ds.labels is not None:
        header.append("label")
    lines = [",".join(header)]
    for i in range(ds.n_points):
        row = [format(float(v), ".17g") for v in ds.points[i]]
        if ds.labels is not None:
            row.append(str(int(ds.labels[i])))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_csv(ds: Dataset, path) -> None:
    Path(path).write_text(format_csv(ds), encoding="utf-8", newline="\n")


def read_csv(path) -> Dataset:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        return _parse_csv(fh, path.stem)


def _parse_csv(fh, name: str) -> Dataset:
    header_line = fh.readline()
    if not header_line.strip():
        raise DatasetFormatError("line 1: missing header")
    header = [h.strip() for h in header_line.rstrip("\r\n").split(",")]
    has_label = header[-1] == "label"
    feat_cols = header[:-1] if has_label else header
    expected = [f"x{m}" for m in range(len(feat_cols))]
    if not feat_cols or feat_cols != expected:
        raise DatasetFormatError(f"line 1: header must be x0,...,x{{d-1}}[,label], got {header_line.strip()!r}")

    width = len(header)
    points: list[list[float]] = []
    labels: list[int] = []
    for lineno, line in enumerate(fh, start=2):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != width:
            raise DatasetFormatError(f"line {lineno}: expected {width} columns, got {len(cells)}")
        try:
            row = [float(c) for c in cells[: len(feat_cols)]]
        except ValueError as exc:
            raise DatasetFormatError(f"line {lineno}: non-numeric coordinate ({exc})") from None
        if not all(np.isfinite(row)):
            raise DatasetFormatError(f"line {lineno}: non-finite coordinate")
        points.append(row)
        if has_label:
            try:
                labels.append(int(cells[-1]))
            except ValueError:
                raise DatasetFormatError(f"line {lineno}: label {cells[-1]!r} is not an integer") from None

    if len(points) < 2:
        raise DatasetFormatError(f"need at least 2 data rows, found {len(points)}")
    try:
        return Dataset(np.array(points), np.array(labels) if has_label else None, name)
    except ValueError as exc:
        raise DatasetFormatError(str(exc)) from None
