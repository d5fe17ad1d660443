"""Experiment harness: clustering-quality grids and formulation-scaling sweeps.

Every trial derives its seed from ``(seed, trial, *sweep_point)``, so any row
of any table can be regenerated on its own. Trials of one sweep point may
run on a thread pool whose size is capped by the ``QB_THREADS`` environment
variable (default 1). Results are collected in trial order.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from ._random import derive_seed
from .baselines import KMeansConfig, balanced_kmeans, kmeans
from .dataspace import Dataset, SyntheticSpec, generate_synthetic, load_iris, subset_balanced
from .metrics import estimate_anneal_time, estimate_embedding_time
from .qubo import build_qubo, decode, encode
from .report import stopwatch
from .solvers import AnnealConfig, cluster_qubo

log = logging.getLogger(__name__)

METHODS = ("kmeans", "balanced", "qubo-exact", "qubo-anneal")
SCALE_METHODS = ("kmeans", "balanced", "qubo")
MAX_SCALE_VARS = 2**16

SYNTH_GRID = ((16, 2), (24, 2), (32, 2), (12, 3), (15, 3), (21, 3), (8, 4), (12, 4), (16, 4))
IRIS_GRID = ((16, 2), (24, 2), (32, 2), (12, 3), (15, 3), (21, 3))

# mode -> (swept parameter, default values, fixed N, k, d)
SCALE_DEFAULTS = {
    "scale-n": ("N", (64, 128, 256, 512, 1024, 2048, 4096), {"N": None, "k": 4, "d": 2}),
    "scale-k": ("k", (2, 4, 8, 16, 32, 64), {"N": 256, "k": None, "d": 8}),
    "scale-d": ("d", (2, 4, 8, 16, 32, 64, 128, 256), {"N": 1024, "k": 4, "d": None}),
}


@dataclass
class ExperimentSpec:
    mode: str
    trials: int = 50
    methods: tuple[str, ...] = ("kmeans", "balanced", "qubo-anneal")
    grid: tuple = ()
    seed: int = 0
    n_features: int = 2
    side_length: float = 2.0
    std_dev: float = 1.0
    fixed: dict = field(default_factory=dict)
    num_reads: int = 100
    sweeps_per_read: int = 1000
    n_restarts: int = 10

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.methods:
            raise ValueError("at least one method is required")
        allowed = SCALE_METHODS if self.mode.startswith("scale") else METHODS
        bad = [m for m in self.methods if m not in allowed]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {list(allowed)}")
        if not self.grid:
            if self.mode == "synth-ari":
                self.grid = SYNTH_GRID
            elif self.mode == "iris-ari":
                self.grid = IRIS_GRID
            elif self.mode in SCALE_DEFAULTS:
                self.grid = SCALE_DEFAULTS[self.mode][1]
            else:
                raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode in SCALE_DEFAULTS and list(self.grid) != sorted(self.grid):
            raise ValueError("sweep values must be sorted")


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("QB_THREADS", "1")))
    except ValueError:
        return 1


def _map_trials(fn, n: int) -> list:
    workers = min(_workers(), n)
    if workers == 1:
        return [fn(t) for t in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n)))


def _mean_sd(values: list[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    mean = statistics.fmean(values)
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, sd


def run_method(
    ds: Dataset,
    k: int,
    method: str,
    seed: int,
    num_reads: int = 100,
    sweeps_per_read: int = 1000,
    n_restarts: int = 10,
):
    """Cluster ``ds`` with one named method; returns ``(assignment, RunReport)``."""
    if method == "kmeans":
        return kmeans(ds, k, KMeansConfig(n_restarts=n_restarts, seed=seed))
    if method == "balanced":
        return balanced_kmeans(ds, k, KMeansConfig(n_restarts=n_restarts, seed=seed))
    if method == "qubo-exact":
        return cluster_qubo(ds, k, "exact")
    if method == "qubo-anneal":
        cfg = AnnealConfig(num_reads=num_reads, sweeps_per_read=sweeps_per_read, seed=seed)
        return cluster_qubo(ds, k, "anneal", cfg)
    raise ValueError(f"unknown method {method!r}")


def _run_spec_method(ds: Dataset, k: int, method: str, seed: int, spec: ExperimentSpec):
    return run_method(ds, k, method, seed, spec.num_reads, spec.sweeps_per_read, spec.n_restarts)


# --- clustering quality ------------------------------------------------------


def _ari_table(spec: ExperimentSpec, make_dataset) -> list[dict]:
    rows = []
    for n, k in spec.grid:

        def trial(t: int, n=n, k=k):
            tseed = derive_seed(spec.seed, t, n, k, spec.n_features)
            ds = make_dataset(n, k, tseed)
            out = {}
            for mi, method in enumerate(spec.methods):
                try:
                    _, rep = _run_spec_method(ds, k, method, derive_seed(tseed, mi), spec)
                    out[method] = rep.ari
                except Exception as exc:  # recorded per trial, the sweep continues
                    log.warning("N=%d k=%d trial %d %s failed: %s", n, k, t, method, exc)
                    out[method] = exc
            return out

        results = _map_trials(trial, spec.trials)
        for method in spec.methods:
            ok = [r[method] for r in results if not isinstance(r[method], Exception)]
            errors = sorted({str(r[method]) for r in results if isinstance(r[method], Exception)})
            mean, sd = _mean_sd(ok)
            rows.append(
                {
                    "N": n,
                    "k": k,
                    "method": method,
                    "mean_ari": mean,
                    "sd_ari": sd,
                    "trials": len(ok),
                    "failed": spec.trials - len(ok),
                    "errors": errors,
                }
            )
    return rows


def cmd_synth_ari(spec: ExperimentSpec) -> list[dict]:
    """Mean and sd ARI per (N, k) problem type on synthetic hypercube data."""

    def make(n, k, seed):
        return generate_synthetic(
            SyntheticSpec(n, k, spec.n_features, spec.side_length, spec.std_dev, seed)
        )

    return _ari_table(spec, make)


def cmd_iris_ari(spec: ExperimentSpec) -> list[dict]:
    """Same protocol on balanced random subsets of the first k Iris classes."""
    iris = load_iris()
    return _ari_table(spec, lambda n, k, seed: subset_balanced(iris, n, k, seed))


# --- scaling -------------------------------------------------------------------


def time_qubo_formulation(ds: Dataset, k: int) -> tuple[float, float]:
    """Measured ``(formulation, postprocess)`` seconds for one dataset.

    Postprocessing decodes a plausible balanced solution, the one-hot
    encoding of the ground-truth classes, since large instances are never
    solved.
    """
    with stopwatch() as t_form:
        inst = build_qubo(ds, k)
    plausible = encode(ds.labels, k)
    with stopwatch() as t_post:
        decode(inst, plausible)
    del inst
    return t_form[0], t_post[0]


def cmd_scale(spec: ExperimentSpec) -> list[dict]:
    swept, _, fixed_defaults = SCALE_DEFAULTS[spec.mode]
    fixed = {**fixed_defaults, **{k: v for k, v in spec.fixed.items() if v is not None}}
    points = []
    for value in spec.grid:
        p = dict(fixed)
        p[swept] = int(value)
        if "qubo" in spec.methods and p["N"] * p["k"] > MAX_SCALE_VARS:
            raise ValueError(
                f"N*k = {p['N'] * p['k']} exceeds the {MAX_SCALE_VARS}-variable memory guard"
            )
        points.append(p)

    embed_c = {}
    rows = []
    for p in points:
        n, k, d = p["N"], p["k"], p["d"]

        def trial(t: int, n=n, k=k, d=d):
            tseed = derive_seed(spec.seed, t, n, k, d)
            ds = generate_synthetic(SyntheticSpec(n, k, d, spec.side_length, spec.std_dev, tseed))
            out = {}
            for mi, method in enumerate(spec.methods):
                if method == "qubo":
                    out[method] = time_qubo_formulation(ds, k)
                else:
                    _, rep = _run_spec_method(ds, k, method, derive_seed(tseed, mi), spec)
                    out[method] = rep.times.solve
            return out

        results = _map_trials(trial, spec.trials)
        embed_c[n * k] = estimate_embedding_time(n * k)
        for method in spec.methods:
            row = {swept: p[swept], "N": n, "k": k, "d": d, "method": method, "trials": spec.trials}
            if method == "qubo":
                form = [r[method][0] for r in results]
                post = [r[method][1] for r in results]
                row["formulation_mean"], row["formulation_sd"] = _mean_sd(form)
                row["postprocess_mean"], row["postprocess_sd"] = _mean_sd(post)
                row["estimated_embed"] = embed_c[n * k]
                row["estimated_anneal"] = estimate_anneal_time()
                totals = [f + q + row["estimated_embed"] + row["estimated_anneal"] for f, q in zip(form, post)]
                row["mean_time"], row["sd_time"] = _mean_sd(totals)
            else:
                row["mean_time"], row["sd_time"] = _mean_sd([r[method] for r in results])
            rows.append(row)
    return rows


def run_experiment(spec: ExperimentSpec) -> list[dict]:
    if spec.mode == "synth-ari":
        return cmd_synth_ari(spec)
    if spec.mode == "iris-ari":
        return cmd_iris_ari(spec)
    if spec.mode in SCALE_DEFAULTS:
        return cmd_scale(spec)
    raise ValueError(f"unknown mode {spec.mode!r}")


# --- output ----------------------------------------------------------------


def to_json(spec: ExperimentSpec, rows: list[dict]) -> str:
    payload = {"spec": asdict(spec), "rows": rows}
    return json.dumps(payload, indent=2, sort_keys=True, default=list) + "\n"


def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    fields = []
    for r in rows:
        fields.extend(f for f in r if f not in fields)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (";".join(v) if isinstance(v, list) else v) for k, v in r.items()})
    return buf.getvalue()
