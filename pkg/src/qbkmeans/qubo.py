"""Balanced k-means as a QUBO.

Variables are the one-hot indicators ``w[i, j] = 1`` iff point ``i`` is in
cluster ``j``, stacked column-major: index ``j * N + i``. All cluster-0
indicators come first, then cluster 1, and so on. The QUBO matrix is

    A = I_k (x) (D + alpha F)  +  Q^T (I_N (x) beta G) Q

with ``F = 1_N - (2N/k) I_N`` (cluster-size penalty) and
``G = 1_k - 2 I_k`` (one-cluster-per-point penalty). ``Q`` permutes the
column-major stack into row-major order. Assembly never materialises the
Kronecker products. It writes the k diagonal blocks and the per-point
cluster couplings directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataspace import Dataset


class DegenerateDatasetError(ValueError):
    """All points coincide, so there is nothing to cluster."""


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    entries: np.ndarray
    max_entry: float


@dataclass(frozen=True, eq=False)
class QuboInstance:
    matrix: np.ndarray
    n_points: int
    n_clusters: int
    alpha: float
    beta: float
    dropped_offset: float

    @property
    def n_vars(self) -> int:
        return self.n_points * self.n_clusters


@dataclass(frozen=True, eq=False)
class BinarySolution:
    bits: np.ndarray
    energy: float


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """Cluster index in ``[0, n_clusters)`` for each point."""

    labels: np.ndarray
    n_clusters: int

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        if lab.ndim != 1:
            raise ValueError("assignment must be a 1-D vector")
        if lab.size and (lab.min() < 0 or lab.max() >= self.n_clusters):
            raise ValueError(f"cluster indices must lie in [0, {self.n_clusters})")
        lab = lab.copy()
        lab.flags.writeable = False
        object.__setattr__(self, "labels", lab)

    def sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.n_clusters).tolist()


@dataclass(frozen=True)
class RepairStats:
    multi_assigned: int
    unassigned: int

    @property
    def total(self) -> int:
        return self.multi_assigned + self.unassigned


def _labels_of(asg) -> np.ndarray:
    return asg.labels if isinstance(asg, ClusterAssignment) else np.asarray(asg, dtype=np.int64)


# --- construction ----------------------------------------------------------


def distance_matrix(ds: Dataset) -> DistanceMatrix:
    """Pairwise squared Euclidean distances, accumulated one feature at a time."""
    x = ds.points
    n = x.shape[0]
    dist = np.zeros((n, n))
    for m in range(x.shape[1]):
        diff = x[:, m, None] - x[None, :, m]
        dist += diff * diff
    dist.flags.writeable = False
    return DistanceMatrix(dist, float(dist.max()))


def penalty_weights(dm: DistanceMatrix, n_points: int, n_clusters: int) -> tuple[float, float]:
    """Return ``(alpha, beta) = (max(D) / (2 N/k - 1), max(D))``."""
    if dm.max_entry <= 0:
        raise DegenerateDatasetError("all points are identical; the dataset has no clustering signal")
    target = n_points / n_clusters
    if 2 * target - 1 <= 0:
        raise ValueError(f"N/k = {target} must exceed 1/2")
    return dm.max_entry / (2 * target - 1), dm.max_entry


def build_permutation(n_points: int, n_clusters: int) -> np.ndarray:
    """Permutation taking the column-major stack to the row-major stack.

    Row ``i`` of the result has its single 1 in column
    ``N * (i mod k) + i // k`` (0-based).
    """
    n, k = n_points, n_clusters
    size = n * k
    q = np.zeros((size, size), dtype=np.int8)
    rows = np.arange(size)
    q[rows, n * (rows % k) + rows // k] = 1
    return q


def build_qubo(ds: Dataset, k: int, alpha: float | None = None, beta: float | None = None) -> QuboInstance:
    """Assemble the QUBO in O(N^2 (d + k)) work plus the O((Nk)^2) output fill.

    ``alpha`` and ``beta`` default to :func:`penalty_weights`; pass them to
    study other penalty strengths.
    """
    n = ds.n_points
    if k < 2 or k > n:
        raise ValueError(f"k={k} must satisfy 2 <= k <= N={n}")
    dm = distance_matrix(ds)
    default_alpha, default_beta = penalty_weights(dm, n, k)
    alpha = default_alpha if alpha is None else float(alpha)
    beta = default_beta if beta is None else float(beta)
    if alpha <= 0 or beta <= 0:
        raise ValueError("penalty weights must be positive")
    target = n / k

    # D + alpha F: off-diagonal d_ij + alpha, diagonal alpha (1 - 2N/k)
    block = dm.entries + alpha
    block[np.diag_indices(n)] = alpha * (1.0 - 2.0 * target)

    size = n * k
    a = np.zeros((size, size))
    diag = np.arange(n)
    for c in range(k):
        lo = c * n
        a[lo : lo + n, lo : lo + n] = block
        # row penalty, same point in two clusters: beta * G[c, c'] = beta
        for c2 in range(k):
            if c2 != c:
                a[lo + diag, c2 * n + diag] = beta
    # row penalty diagonal: beta * G[c, c] = -beta
    a[np.diag_indices(size)] -= beta

    offset = k * alpha * target * target + n * beta
    return QuboInstance(a, n, k, alpha, beta, offset)


# --- evaluation ------------------------------------------------------------


def _check_bits(inst: QuboInstance, bits) -> np.ndarray:
    z = np.asarray(bits)
    if z.shape != (inst.n_vars,):
        raise ValueError(f"expected {inst.n_vars} bits, got shape {z.shape}")
    if not np.all((z == 0) | (z == 1)):
        raise ValueError("bits must be 0/1")
    return z.astype(np.int8)


def energy(inst: QuboInstance, bits) -> float:
    """``z^T A z`` summed with ``math.fsum`` over the active submatrix."""
    z = _check_bits(inst, bits)
    on = np.flatnonzero(z)
    if on.size == 0:
        return 0.0
    return math.fsum(inst.matrix[np.ix_(on, on)].ravel())


def encode(asg, n_clusters: int | None = None) -> np.ndarray:
    """One-hot, column-major bit vector of an assignment."""
    labels = _labels_of(asg)
    k = asg.n_clusters if isinstance(asg, ClusterAssignment) else n_clusters
    if k is None:
        raise ValueError("n_clusters is required for a raw label vector")
    n = labels.size
    bits = np.zeros(n * k, dtype=np.int8)
    bits[labels * n + np.arange(n)] = 1
    return bits


def decode(inst: QuboInstance, bits) -> tuple[ClusterAssignment, RepairStats]:
    """Read a cluster per point, repairing infeasible rows.

    A point with several cluster bits set goes to the lowest such index; a
    point with none goes to cluster 0.
    """
    z = _check_bits(inst, bits)
    w = z.reshape(inst.n_clusters, inst.n_points).T
    per_point = w.sum(axis=1)
    labels = np.argmax(w, axis=1)  # first set bit; 0 when the row is empty
    stats = RepairStats(int(np.count_nonzero(per_point > 1)), int(np.count_nonzero(per_point == 0)))
    return ClusterAssignment(labels, inst.n_clusters), stats


def _pairwise_sums(ds: Dataset, labels: np.ndarray, k: int) -> tuple[list[float], list[int]]:
    dist = distance_matrix(ds).entries
    sums, sizes = [], []
    for c in range(k):
        idx = np.flatnonzero(labels == c)
        sums.append(math.fsum(dist[np.ix_(idx, idx)].ravel()))
        sizes.append(idx.size)
    return sums, sizes


def feasible_objective(ds: Dataset, asg) -> float:
    """Sum over clusters of squared distances over ordered pairs of members."""
    labels = _labels_of(asg)
    k = int(labels.max()) + 1 if labels.size else 0
    sums, _ = _pairwise_sums(ds, labels, k)
    return math.fsum(sums)


def variance_objective(ds: Dataset, asg) -> float:
    """Within-cluster sum of squared distances to the cluster centroids."""
    labels = _labels_of(asg)
    k = asg.n_clusters if isinstance(asg, ClusterAssignment) else int(labels.max()) + 1
    total = []
    for c in range(k):
        members = ds.points[labels == c]
        if members.shape[0] == 0:
            raise ValueError(f"cluster {c} is empty")
        centered = members - members.mean(axis=0)
        total.append(math.fsum((centered * centered).ravel()))
    return math.fsum(total)


def pairwise_variance_objective(ds: Dataset, asg) -> float:
    """The same objective via pairwise distances: sum_c S_c / (2 |c|)."""
    labels = _labels_of(asg)
    k = asg.n_clusters if isinstance(asg, ClusterAssignment) else int(labels.max()) + 1
    sums, sizes = _pairwise_sums(ds, labels, k)
    if min(sizes) == 0:
        raise ValueError("empty cluster")
    return math.fsum(s / (2 * m) for s, m in zip(sums, sizes))


# --- export ----------------------------------------------------------------


def write_qubo(inst: QuboInstance, path) -> None:
    """Write ``i j value`` lines for the upper triangle, diagonal included.

    Off-diagonal values are doubled (``2 A_ij``) so that summing
    ``value * z_i * z_j`` over the listed entries reproduces ``z^T A z``.
    Zero entries are omitted.
    """
    a = inst.matrix
    rows, cols = np.triu_indices(a.shape[0])
    vals = a[rows, cols] * np.where(rows == cols, 1.0, 2.0)
    keep = vals != 0
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for i, j, v in zip(rows[keep], cols[keep], vals[keep]):
            fh.write(f"{i} {j} {format(float(v), '.17g')}\n")


def read_qubo(path, n_vars: int) -> np.ndarray:
    """Load an exported upper-triangular file back into a symmetric matrix."""
    a = np.zeros((n_vars, n_vars))
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'i j value'")
            i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            if i == j:
                a[i, i] += v
            else:
                a[i, j] += v / 2
                a[j, i] += v / 2
    return a
