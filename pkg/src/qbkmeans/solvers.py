"""QUBO minimisers and the end-to-end QUBO clustering pipeline.

``solve_exact`` enumerates every bit vector and is the ground-truth oracle
for small instances. ``solve_anneal`` is a classical simulated annealer that
follows the quantum-annealing protocol: many independent reads, keep the
lowest-energy sample.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._random import make_rng
from .dataspace import Dataset
from .metrics import estimate_anneal_time, estimate_embedding_time
from .qubo import BinarySolution, ClusterAssignment, QuboInstance, build_qubo, decode, energy
from .report import RunReport, score, stopwatch

log = logging.getLogger(__name__)

ENUMERATION_VARS = 26
MAX_EXACT_VARS = 32


class ProblemTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class AnnealConfig:
    """Simulated-annealing parameters.

    When ``beta_schedule`` is None the endpoints are derived from the matrix:
    ``0.1 / max|A_ij|`` to ``10 / min nonzero |A_ij|``, interpolated
    geometrically over the sweeps.
    """

    num_reads: int = 100
    sweeps_per_read: int = 1000
    beta_schedule: tuple[float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.num_reads < 1:
            raise ValueError("num_reads must be positive")
        if self.sweeps_per_read < 0:
            raise ValueError("sweeps_per_read must be non-negative")
        if self.beta_schedule is not None:
            b0, b1 = self.beta_schedule
            if not 0 < b0 < b1:
                raise ValueError("beta schedule must satisfy 0 < beta_initial < beta_final")


@dataclass(frozen=True, eq=False)
class SolveResult:
    best: BinarySolution
    all_read_energies: list[float]
    solver_name: str
    wall_time: float


def solve_exact(inst: QuboInstance | np.ndarray, method: str = "auto") -> SolveResult:
    """Global minimiser; ties go to the lexicographically smallest bit vector.

    Up to 26 variables every state is enumerated in Gray-code order.
    Instances of 27 to 32 variables use depth-first branch and bound, which
    is exact but has no useful worst-case bound. ``method`` forces
    ``"enumerate"`` or ``"bnb"``.
    """
    a = np.ascontiguousarray(_matrix(inst), dtype=np.float64)
    n = a.shape[0]
    if method == "auto":
        method = "enumerate" if n <= ENUMERATION_VARS else "bnb"
    limit = ENUMERATION_VARS if method == "enumerate" else MAX_EXACT_VARS
    if n > limit:
        raise ProblemTooLargeError(f"exact {method} is limited to {limit} variables, instance has {n}")
    start = time.perf_counter()
    tol = 1e-10 * max(1.0, float(np.abs(a).sum()))
    if method == "enumerate":
        code, _ = _kernels.enumerate_min(a, tol)
        bits = np.array([(int(code) >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.int8)
    elif method == "bnb":
        bits, _ = _kernels.branch_and_bound_min(a, tol)
    else:
        raise ValueError(f"unknown exact method {method!r}")
    e = _energy(inst, bits)
    wall = time.perf_counter() - start
    return SolveResult(BinarySolution(bits, e), [e], f"exact-{method}", wall)


def default_beta_schedule(a: np.ndarray) -> tuple[float, float]:
    mags = np.abs(a)
    nonzero = mags[mags > 0]
    if nonzero.size == 0:
        return 1.0, 10.0
    b0 = 0.1 / nonzero.max()
    b1 = 10.0 / nonzero.min()
    if b1 <= b0:
        b1 = 100.0 * b0
    return float(b0), float(b1)


def solve_anneal(inst: QuboInstance | np.ndarray, cfg: AnnealConfig = AnnealConfig()) -> SolveResult:
    """Best of ``num_reads`` independent single-flip Metropolis anneals.

    Read ``r`` draws its random start and acceptance variates from its own
    stream keyed by ``(seed, r)``, so results do not depend on read order.
    """
    a = np.ascontiguousarray(_matrix(inst), dtype=np.float64)
    n = a.shape[0]
    b0, b1 = cfg.beta_schedule or default_beta_schedule(a)
    sweeps = cfg.sweeps_per_read
    if sweeps == 1:
        betas = np.array([b1])
    else:
        betas = np.geomspace(b0, b1, sweeps) if sweeps else np.empty(0)

    start = time.perf_counter()
    best_bits, best_e = None, np.inf
    energies = []
    for r in range(cfg.num_reads):
        rng = make_rng(cfg.seed, r)
        state = rng.integers(0, 2, size=n, dtype=np.int8)
        uniforms = rng.random((sweeps, n))
        state = _kernels.anneal_read(a, state, betas, uniforms)
        e = _energy(inst, state)
        energies.append(e)
        if e < best_e:
            best_bits, best_e = state.copy(), e
    wall = time.perf_counter() - start
    return SolveResult(BinarySolution(best_bits, best_e), energies, "anneal", wall)


def _matrix(inst) -> np.ndarray:
    return inst.matrix if isinstance(inst, QuboInstance) else np.asarray(inst, dtype=np.float64)


def _energy(inst, bits) -> float:
    if isinstance(inst, QuboInstance):
        return energy(inst, bits)
    on = np.flatnonzero(bits)
    return float(np.sum(inst[np.ix_(on, on)])) if on.size else 0.0


def cluster_qubo(
    ds: Dataset, k: int, backend: str = "anneal", cfg: AnnealConfig | None = None
) -> tuple[ClusterAssignment, RunReport]:
    """Formulate, solve and decode; time each phase."""
    if backend not in ("exact", "anneal"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "exact" and ds.n_points * k > MAX_EXACT_VARS:
        raise ProblemTooLargeError(
            f"exact backend needs N*k <= {MAX_EXACT_VARS}, got {ds.n_points * k}"
        )
    with stopwatch() as t_form:
        inst = build_qubo(ds, k)
    if backend == "exact":
        result = solve_exact(inst)
    else:
        result = solve_anneal(inst, cfg or AnnealConfig())
    with stopwatch() as t_post:
        asg, repairs = decode(inst, result.best.bits)

    report = RunReport(f"qubo-{backend}", ds.n_points, k, energy=result.best.energy)
    report.multi_assigned = repairs.multi_assigned
    report.unassigned = repairs.unassigned
    tm = report.times
    tm.formulation = t_form[0]
    tm.solve = result.wall_time
    tm.postprocess = t_post[0]
    tm.estimated_embed = estimate_embedding_time(inst.n_vars)
    tm.estimated_anneal = estimate_anneal_time()
    tm.total = tm.formulation + tm.estimated_embed + tm.estimated_anneal + tm.postprocess
    if repairs.total:
        log.debug("decoded %s with %d repaired points", ds.name, repairs.total)
    return asg, score(report, ds, asg)
