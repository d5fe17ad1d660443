"""Classical comparison methods: Lloyd's k-means and balanced k-means.

Balanced k-means alternates a centroid update with an optimal balanced
assignment step. Cluster ``c`` owns a fixed number of slots (``ceil(N/k)``
for the first ``N mod k`` clusters, ``floor(N/k)`` for the rest). Points are
matched to slots by a minimum-cost bipartite assignment on squared
distances. Each assignment step is O(N^3).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._random import make_rng
from .dataspace import Dataset
from .qubo import ClusterAssignment
from .report import RunReport, score


@dataclass(frozen=True)
class KMeansConfig:
    n_restarts: int = 10
    max_iterations: int = 300
    tolerance: float = 1e-4
    seed: int = 0
    init: str = "kmeanspp"

    def __post_init__(self):
        if self.n_restarts < 1 or self.max_iterations < 1:
            raise ValueError("n_restarts and max_iterations must be positive")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")
        if self.init not in ("kmeanspp", "random"):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass
class LloydResult:
    labels: np.ndarray
    centroids: np.ndarray
    objective: float
    history: list[float]
    n_iter: int


def _sq_dists(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _objective(x: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    diff = x - centroids[labels]
    return float(np.einsum("ij,ij->", diff, diff))


def kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: each new centre sampled proportionally to D(x)^2."""
    n = x.shape[0]
    centers = [x[rng.integers(n)]]
    closest = np.sum((x - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(x[idx])
        closest = np.minimum(closest, np.sum((x - x[idx]) ** 2, axis=1))
    return np.array(centers)


def _init_centroids(x: np.ndarray, k: int, cfg: KMeansConfig, rng) -> np.ndarray:
    if cfg.init == "random":
        return x[rng.choice(x.shape[0], size=k, replace=False)].copy()
    return kmeanspp_init(x, k, rng)


def _fill_empty(x: np.ndarray, labels: np.ndarray, centroids: np.ndarray, k: int) -> None:
    """Move the worst-fitting point into each empty cluster (in place)."""
    counts = np.bincount(labels, minlength=k)
    for c in np.flatnonzero(counts == 0):
        resid = np.sum((x - centroids[labels]) ** 2, axis=1)
        resid[counts[labels] <= 1] = -1.0  # never empty another cluster
        far = int(np.argmax(resid))
        counts[labels[far]] -= 1
        labels[far] = c
        counts[c] = 1
        centroids[c] = x[far]


def lloyd(x: np.ndarray, centroids: np.ndarray, max_iterations: int = 300, tolerance: float = 1e-4) -> LloydResult:
    """Lloyd iterations from the given centroids.

    Stops when no label changes or the summed squared centroid shift drops
    to ``tolerance``. ``history`` holds the objective after every update step.
    """
    x = np.asarray(x, dtype=np.float64)
    centroids = np.array(centroids, dtype=np.float64)
    k = centroids.shape[0]
    labels = np.argmin(_sq_dists(x, centroids), axis=1)
    history = []
    it = 0
    for it in range(1, max_iterations + 1):
        _fill_empty(x, labels, centroids, k)
        new = np.array([x[labels == c].mean(axis=0) for c in range(k)])
        shift = float(np.sum((new - centroids) ** 2))
        centroids = new
        history.append(_objective(x, labels, centroids))
        new_labels = np.argmin(_sq_dists(x, centroids), axis=1)
        if np.array_equal(new_labels, labels) or shift <= tolerance:
            if not np.array_equal(new_labels, labels):
                labels = new_labels
                _fill_empty(x, labels, centroids, k)
                centroids = np.array([x[labels == c].mean(axis=0) for c in range(k)])
                history.append(_objective(x, labels, centroids))
            break
        labels = new_labels
    return LloydResult(labels, centroids, _objective(x, labels, centroids), history, it)


def slot_sizes(n: int, k: int) -> list[int]:
    """Cluster capacities; surplus goes to the lowest indices."""
    base, extra = divmod(n, k)
    return [base + 1 if c < extra else base for c in range(k)]


def balanced_assignment(x: np.ndarray, centroids: np.ndarray, sizes=None) -> np.ndarray:
    """Minimum-cost assignment of points to cluster slots of the given capacities."""
    n, k = x.shape[0], centroids.shape[0]
    sizes = slot_sizes(n, k) if sizes is None else list(sizes)
    if sum(sizes) != n:
        raise ValueError("slot capacities must sum to N")
    slot_cluster = np.repeat(np.arange(k), sizes)
    cost = _sq_dists(x, centroids)[:, slot_cluster]
    rows, cols = linear_sum_assignment(cost)
    labels = np.empty(n, dtype=np.int64)
    labels[rows] = slot_cluster[cols]
    return labels


def balanced_lloyd(x: np.ndarray, centroids: np.ndarray, max_iterations: int = 300) -> LloydResult:
    """Alternate balanced assignment and centroid update until the labels repeat."""
    x = np.asarray(x, dtype=np.float64)
    centroids = np.array(centroids, dtype=np.float64)
    k = centroids.shape[0]
    labels = None
    history = []
    it = 0
    for it in range(1, max_iterations + 1):
        new_labels = balanced_assignment(x, centroids)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        centroids = np.array([x[labels == c].mean(axis=0) for c in range(k)])
        history.append(_objective(x, labels, centroids))
    return LloydResult(labels, centroids, _objective(x, labels, centroids), history, it)


def _run(ds: Dataset, k: int, cfg: KMeansConfig, method: str, step) -> tuple[ClusterAssignment, RunReport]:
    n = ds.n_points
    if k < 1 or k > n:
        raise ValueError(f"k={k} must satisfy 1 <= k <= N={n}")
    start = time.perf_counter()
    best = None
    for r in range(cfg.n_restarts):
        rng = make_rng(cfg.seed, r)
        res = step(ds.points, _init_centroids(ds.points, k, cfg, rng))
        # strict '<' keeps the lowest restart index on ties
        if best is None or res.objective < best.objective:
            best = res
    wall = time.perf_counter() - start

    asg = ClusterAssignment(best.labels, k)
    report = RunReport(method, n, k)
    report.times.solve = wall
    report.times.total = wall
    return asg, score(report, ds, asg)


def kmeans(ds: Dataset, k: int, cfg: KMeansConfig = KMeansConfig()) -> tuple[ClusterAssignment, RunReport]:
    """Best-of-``n_restarts`` Lloyd's k-means by within-cluster sum of squares."""
    return _run(ds, k, cfg, "kmeans", lambda x, c: lloyd(x, c, cfg.max_iterations, cfg.tolerance))


def balanced_kmeans(ds: Dataset, k: int, cfg: KMeansConfig = KMeansConfig()) -> tuple[ClusterAssignment, RunReport]:
    """Balanced k-means; cluster sizes differ by at most one."""
    return _run(ds, k, cfg, "balanced", lambda x, c: balanced_lloyd(x, c, cfg.max_iterations))

