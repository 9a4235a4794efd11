"""Command-line interface: sample, sweep, limits, act."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .diagnostics import act_from_series
from .limits import hside_limit, hwalk_limit, optimize_limit, side_limit, stretch_limit
from .runner import ExperimentConfig, run_experiment, run_scaling_sweep


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, steps = text.split(":")
        grid = np.linspace(float(lo), float(hi), int(steps))
    except Exception as exc:
        raise ValueError(f"bad grid {text!r}; expected lo:hi:steps") from exc
    if grid.size < 1:
        raise ValueError("grid needs at least one point")
    return grid


def _limit_fn(args):
    if args.family == "side":
        return lambda a: side_limit(a, n_mc=args.n_mc, noise=args.noise, seed=args.seed)
    if args.family == "stretch":
        return lambda b: stretch_limit(b, n_mc=args.n_mc, seed=args.seed)
    if args.family == "hwalk":
        return lambda a: hwalk_limit(a, ratio=args.rho, total_time=args.T,
                                     n_mc=args.n_mc, seed=args.seed)
    return lambda a: hside_limit(a, n_steps=args.n, n_mc=args.n_mc, seed=args.seed)


def _cmd_sample(args) -> int:
    config = json.loads(Path(args.config).read_text())
    exp = ExperimentConfig.from_dict(config, preset=args.preset)
    summary = run_experiment(exp, out_dir=args.out)
    if summary["tau_unconverged"]:
        print("warning: no self-consistent autocorrelation window; "
              "tau estimate is unconverged", file=sys.stderr)
    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def _cmd_sweep(args) -> int:
    config = json.loads(Path(args.config).read_text())
    dims = [int(v) for v in args.dims.split(",") if v]
    out_path = None
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        out_path = Path(args.out) / "sweep.csv"
    rows = run_scaling_sweep(config, dims, preset=args.preset, out_path=out_path)
    writer = csv.DictWriter(sys.stdout,
                            fieldnames=["d", "sampler", "tau", "acceptance", "tau_unconverged"])
    writer.writeheader()
    writer.writerows(rows)
    return 0


def _cmd_limits(args) -> int:
    fn = _limit_fn(args)
    rows = []
    if args.optimize:
        if args.family not in ("side", "stretch"):
            raise ValueError("--optimize supports the side and stretch families")
        grid = _parse_grid(args.grid)
        objective = lambda p: fn(p)[1].value
        best, _ = optimize_limit(objective, float(grid[0]), float(grid[-1]), tol=args.tol)
        acc, esjd = fn(best)
        rows.append((best, acc, esjd))
    else:
        for p in _parse_grid(args.grid):
            acc, esjd = fn(float(p))
            rows.append((float(p), acc, esjd))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["param", "acceptance", "acc_stderr", "esjd", "esjd_stderr"])
        for p, acc, esjd in rows:
            writer.writerow([repr(float(p)), repr(acc.value), repr(acc.std_error),
                             repr(esjd.value), repr(esjd.std_error)])
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_act(args) -> int:
    values = []
    with open(args.series, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                values.append(float(row[-1]))
            except ValueError:
                continue  # header line
    act = act_from_series(np.asarray(values), c=args.c, thin=args.thin)
    json.dump({"tau": act.tau, "window": act.window, "thin": act.thin,
               "converged": act.converged}, sys.stdout, indent=2, sort_keys=True)
    print()
    if not act.converged:
        print("warning: no self-consistent window", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affinemc",
        description="Affine-invariant ensemble MCMC experiments and limit curves.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="run one experiment from a JSON config")
    p.add_argument("--config", required=True, help="path to a JSON experiment config")
    p.add_argument("--preset", choices=["desk", "paper"], default=None,
                   help="iteration budget preset (desk = paper / 10)")
    p.add_argument("--out", default=None, help="directory for summary.json and acf.csv")
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("sweep", help="run the same experiment over several dimensions")
    p.add_argument("--config", required=True)
    p.add_argument("--dims", required=True, help="comma-separated dimensions, ascending")
    p.add_argument("--preset", choices=["desk", "paper"], default=None)
    p.add_argument("--out", default=None, help="directory for sweep.csv")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("limits", help="evaluate limiting acceptance/ESJD curves")
    p.add_argument("--family", required=True, choices=["side", "stretch", "hwalk", "hside"])
    p.add_argument("--grid", required=True, help="parameter grid lo:hi:steps")
    p.add_argument("--optimize", action="store_true",
                   help="emit only the ESJD argmax over the grid interval")
    p.add_argument("--n-mc", type=int, default=10_000_000, dest="n_mc")
    p.add_argument("--noise", choices=["gaussian", "uniform"], default="gaussian",
                   help="side-move noise distribution")
    p.add_argument("--n", type=int, default=3, help="leapfrog steps (hside family)")
    p.add_argument("--rho", type=float, default=0.25, help="aspect ratio (hwalk family)")
    p.add_argument("--T", type=float, default=1.0, help="integration time (hwalk family)")
    p.add_argument("--tol", type=float, default=1e-3, help="optimizer bracket tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.set_defaults(fn=_cmd_limits)

    p = sub.add_parser("act", help="integrated autocorrelation time of a series file")
    p.add_argument("--series", required=True, help="CSV/plain file, one value per line")
    p.add_argument("--c", type=float, default=5.0, help="window constant")
    p.add_argument("--thin", type=int, default=1,
                   help="thinning already applied to the series")
    p.set_defaults(fn=_cmd_act)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
