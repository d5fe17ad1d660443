"""Command-line entry point.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench
from .bench import ExperimentSpec
from .dataspace import SyntheticSpec, format_csv, generate_synthetic, load_iris, read_csv


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _grid(text: str) -> list[tuple[int, int]]:
    """Parse ``N:k,N:k,...``."""
    try:
        pairs = [tuple(int(x) for x in item.split(":")) for item in text.split(",") if item.strip()]
    except ValueError:
        pairs = []
    if not pairs or any(len(p) != 2 for p in pairs):
        raise argparse.ArgumentTypeError(f"expected N:k pairs like 16:2,12:3, got {text!r}")
    return pairs


def _methods(text: str) -> tuple[str, ...]:
    return tuple(m.strip() for m in text.split(",") if m.strip())


_SYNTH_KEYS = {"n": "n_points", "k": "n_clusters", "d": "n_features", "side": "side_length", "std": "std_dev"}


def _synthetic(text: str) -> dict:
    """Parse ``N=8,k=4,d=2[,side=2.0,std=1.0]``."""
    out = {}
    for item in text.split(","):
        key, sep, val = item.partition("=")
        field = _SYNTH_KEYS.get(key.strip().lower())
        if not sep or field is None:
            raise argparse.ArgumentTypeError(f"bad synthetic field {item!r}; use N=,k=,d=,side=,std=")
        try:
            out[field] = float(val) if field in ("side_length", "std_dev") else int(val)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad value in {item!r}") from None
    missing = {"n_points", "n_clusters", "n_features"} - out.keys()
    if missing:
        raise argparse.ArgumentTypeError(f"synthetic spec missing {sorted(missing)}")
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _anneal_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--reads", type=int, default=100, help="annealer reads per solve")
    p.add_argument("--sweeps", type=int, default=1000, help="annealer sweeps per read")
    p.add_argument("--restarts", type=int, default=10, help="k-means restarts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbkmeans", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster one dataset with one method")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", type=Path, help="dataset CSV")
    src.add_argument("--synthetic", type=_synthetic, metavar="N=..,k=..,d=..")
    src.add_argument("--iris", action="store_true", help="use the bundled Iris data")
    p.add_argument("--method", choices=bench.METHODS, default="qubo-anneal")
    p.add_argument("--k", type=int, help="number of clusters (default: number of label classes)")
    _common(p)
    _anneal_flags(p)

    p = sub.add_parser("gen", help="write a synthetic dataset or the bundled Iris data as CSV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--synthetic", type=_synthetic, metavar="N=..,k=..,d=..")
    src.add_argument("--iris", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)

    for mode, helptext in (("synth-ari", "ARI grid on synthetic data"), ("iris-ari", "ARI grid on Iris subsets")):
        p = sub.add_parser(mode, help=helptext)
        p.add_argument("--grid", type=_grid, help="N:k pairs, e.g. 16:2,12:3")
        p.add_argument("--trials", type=int, default=50)
        p.add_argument("--methods", type=_methods, default=("kmeans", "balanced", "qubo-anneal"))
        if mode == "synth-ari":
            p.add_argument("--d", type=int, default=2, help="features")
            p.add_argument("--side-length", type=float, default=2.0)
            p.add_argument("--std-dev", type=float, default=1.0)
        _common(p)
        _anneal_flags(p)

    for mode, (swept, values, fixed) in bench.SCALE_DEFAULTS.items():
        p = sub.add_parser(mode, help=f"timing sweep over {swept}")
        p.add_argument("--values", type=_int_list, help=f"{swept} values (default {','.join(map(str, values))})")
        for name in ("N", "k", "d"):
            if name != swept:
                p.add_argument(f"--{name}", dest=f"fixed_{name}", type=int, default=fixed[name])
        p.add_argument("--trials", type=int, default=50)
        p.add_argument("--methods", type=_methods, default=bench.SCALE_METHODS)
        _common(p)
        _anneal_flags(p)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8", newline="\n")


def _cmd_cluster(args, parser) -> int:
    if args.data is not None:
        ds = read_csv(args.data)
    elif args.iris:
        ds = load_iris()
    else:
        ds = generate_synthetic(SyntheticSpec(seed=args.seed, **args.synthetic))
    k = args.k
    if k is None:
        if ds.labels is None:
            parser.error("--k is required when the dataset has no labels")
        k = ds.n_classes
    asg, report = bench.run_method(ds, k, args.method, args.seed, args.reads, args.sweeps, args.restarts)
    payload = {"dataset": ds.name, "assignment": asg.labels.tolist(), "report": report.to_dict()}
    if args.format == "json":
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        row = {k: v for k, v in report.to_dict().items() if k != "times"}
        row.update({f"time_{k}": v for k, v in report.times.__dict__.items()})
        _emit(bench.to_csv([row]), args.out)
    return 0


def _cmd_gen(args) -> int:
    ds = load_iris() if args.iris else generate_synthetic(SyntheticSpec(seed=args.seed, **args.synthetic))
    _emit(format_csv(ds), args.out)
    return 0


def _cmd_experiment(args, parser) -> int:
    mode = args.command
    kwargs = dict(mode=mode, trials=args.trials, methods=args.methods, seed=args.seed,
                  num_reads=args.reads, sweeps_per_read=args.sweeps, n_restarts=args.restarts)
    if mode in bench.SCALE_DEFAULTS:
        kwargs["grid"] = tuple(args.values or ())
        kwargs["fixed"] = {n: getattr(args, f"fixed_{n}", None) for n in ("N", "k", "d")}
    else:
        kwargs["grid"] = tuple(args.grid or ())
        if mode == "synth-ari":
            kwargs.update(n_features=args.d, side_length=args.side_length, std_dev=args.std_dev)
    try:
        spec = ExperimentSpec(**kwargs)
    except ValueError as exc:
        parser.error(str(exc))
    rows = bench.run_experiment(spec)
    text = bench.to_json(spec, rows) if args.format == "json" else bench.to_csv(rows)
    _emit(text, args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "cluster":
            return _cmd_cluster(args, parser)
        if args.command == "gen":
            return _cmd_gen(args)
        return _cmd_experiment(args, parser)
    except (ValueError, OSError) as exc:
        print(f"qbkmeans: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
