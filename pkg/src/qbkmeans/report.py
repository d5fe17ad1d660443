"""Per-run timing and quality record shared by every clustering method."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

from .dataspace import Dataset
from .metrics import adjusted_rand_index
from .qubo import ClusterAssignment, feasible_objective, variance_objective


@dataclass
class Timings:
    """Seconds spent per phase.

    ``solve`` is the classical wall time of whichever solver ran. For QUBO
    methods the quantum-hardware total replaces it with the estimated
    embedding and anneal times, as a D-Wave run would incur.
    """

    formulation: float = 0.0
    solve: float = 0.0
    postprocess: float = 0.0
    estimated_embed: float = 0.0
    estimated_anneal: float = 0.0
    total: float = 0.0


@dataclass
class RunReport:
    method: str
    n_points: int
    n_clusters: int
    ari: float | None = None
    objective_variance: float | None = None
    objective_pairwise: float | None = None
    times: Timings = field(default_factory=Timings)
    multi_assigned: int = 0
    unassigned: int = 0
    cluster_sizes: list[int] = field(default_factory=list)
    energy: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@contextmanager
def stopwatch():
    """Yield a one-element list that receives the elapsed monotonic seconds."""
    out = [0.0]
    start = time.perf_counter()
    try:
        yield out
    finally:
        out[0] = time.perf_counter() - start


def score(report: RunReport, ds: Dataset, asg: ClusterAssignment) -> RunReport:
    """Fill quality fields of ``report`` from an assignment."""
    sizes = asg.sizes()
    report.cluster_sizes = sizes
    report.objective_pairwise = feasible_objective(ds, asg)
    report.objective_variance = variance_objective(ds, asg) if min(sizes) > 0 else None
    if ds.labels is not None:
        report.ari = adjusted_rand_index(asg, ds.labels)
    return report
