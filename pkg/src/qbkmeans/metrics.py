"""Partition agreement (ARI) and the annealer timing model."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    total: int


def _as_labels(x) -> np.ndarray:
    labels = getattr(x, "labels", x)
    return np.asarray(labels, dtype=np.int64)


def contingency(a, b) -> ContingencyTable:
    """Intersection counts ``n_ij = |a_i & b_j|`` between two partitions.

    Cluster ids are compacted to ``0..r-1`` in sorted order, so unused ids
    produce no empty rows or columns.
    """
    la, lb = _as_labels(a), _as_labels(b)
    if la.shape != lb.shape:
        raise ValueError(f"partitions differ in length: {la.size} vs {lb.size}")
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    counts = np.zeros((ia.max(initial=-1) + 1, ib.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(counts, (ia, ib), 1)
    return ContingencyTable(counts, counts.sum(axis=1), counts.sum(axis=0), int(la.size))


def adjusted_rand_index(a, b) -> float:
    """Adjusted rand index of two labelings of the same points.

    Pair counts stay in exact integer arithmetic until the final division.
    When the denominator vanishes (both partitions trivial), identical
    partitions score 1.0 and anything else 0.0.
    """
    table = contingency(a, b)
    n = table.total
    if n < 2:
        raise ValueError("ARI needs at least 2 points")
    sum_ij = sum(comb(int(v), 2) for v in table.counts.ravel())
    sum_a = sum(comb(int(v), 2) for v in table.row_sums)
    sum_b = sum(comb(int(v), 2) for v in table.col_sums)
    pairs = comb(n, 2)
    # scale numerator and denominator by 2 * C(N, 2) to stay integral
    num = 2 * (sum_ij * pairs - sum_a * sum_b)
    den = (sum_a + sum_b) * pairs - 2 * sum_a * sum_b
    if den == 0:
        return 1.0 if num == 0 and _same_partition(table) else 0.0
    return num / den


def _same_partition(table: ContingencyTable) -> bool:
    c = table.counts
    return c.shape[0] == c.shape[1] and np.count_nonzero(c) == c.shape[0]


@dataclass(frozen=True)
class TimingModel:
    """Embedding-time polynomial and constant anneal time of the quantum annealer."""

    embed_c2: float = 1.887e-6
    embed_c1: float = 4.632e-6
    embed_c0: float = 4.022e-4
    anneal_mean: float = 0.03481
    anneal_sd: float = 0.00008


DEFAULT_TIMING = TimingModel()


def estimate_embedding_time(num_vars: int, model: TimingModel = DEFAULT_TIMING) -> float:
    """Seconds to minor-embed a QUBO with ``num_vars`` binary variables."""
    if num_vars < 1:
        raise ValueError("num_vars must be >= 1")
    n = float(num_vars)
    return model.embed_c2 * n * n + model.embed_c1 * n + model.embed_c0


def estimate_anneal_time(model: TimingModel = DEFAULT_TIMING) -> float:
    return model.anneal_mean
