"""Experiment runner: configure target + sampler + budget, run, summarize.

A run initializes N walkers i.i.d. normal in a deliberately tight ball
(scale 0.1), burns in, then samples while recording the thinned
ensemble-mean observable series, acceptance counters, the squared-jump
accumulator, and measured evaluation counts.  The summary is written as JSON
next to an autocorrelation CSV.

The under-dispersed start matters: the ensemble-preconditioned Hamiltonian
moves are stable whenever the ensemble spread is at or below the target's
scale and then inflate to stationarity geometrically, whereas an
over-dispersed start on a stiff target can reject forever (the
preconditioner never adapts because no walker ever moves).
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng
from .base import Move
from .diagnostics import act_from_series
from .ensemble import ChainRecord, Ensemble
from .hamiltonian import HamiltonianSideMove, HamiltonianWalkMove, Hmc
from .moves import SideMove, StretchMove, WalkMove
from .targets import CountingTarget, make_target, path_integral

SEED_ENV_VAR = "AFFINEMC_SEED"

# Walkers start i.i.d. N(0, INIT_SCALE^2 I): under-dispersed on purpose.
INIT_SCALE = 0.1

# (burn-in, sampling) iteration budgets.  "paper" is the full protocol;
# "desk" divides both by 10 so a run finishes in minutes.
PRESETS = {
    "paper": (200_000, 1_000_000),
    "desk": (20_000, 100_000),
}

OBSERVABLES = {
    "x1": lambda x: x[..., 0],
    "path_integral": path_integral,
}

_TARGET_FIELDS = {"target", "d", "kappa", "l"}
_SAMPLER_FIELDS = {"sampler", "a", "sigma", "noise", "subset", "T", "n", "h"}
_RUN_FIELDS = {"walkers", "burn_in", "iterations", "thin", "seed", "observable"}
_TARGET_KINDS = {"gaussian", "standard_gaussian", "ring", "allen_cahn"}
_SAMPLER_KINDS = {"stretch", "side", "walk", "hmc", "hwalk", "hside"}


def build_move(sampler_config: dict) -> Move:
    """Construct a move from a CLI-style sampler configuration."""
    kind = sampler_config.get("sampler")
    if kind == "stretch":
        return StretchMove(a=sampler_config.get("a"))
    if kind == "side":
        return SideMove(step_scale=sampler_config.get("sigma"),
                        noise=sampler_config.get("noise", "gaussian"))
    if kind == "walk":
        subset = sampler_config.get("subset")
        return WalkMove(subset_size=None if subset is None else int(subset))
    if kind in ("hmc", "hwalk", "hside"):
        n_steps = int(sampler_config.get("n", 10))
        step = sampler_config.get("h")
        total = None if step is not None else float(sampler_config.get("T", 1.0))
        if kind == "hmc":
            return Hmc(n_steps, step_size=step, total_time=total)
        if kind == "hwalk":
            subset = sampler_config.get("subset")
            return HamiltonianWalkMove(n_steps, step_size=step, total_time=total,
                                       subset_size=None if subset is None else int(subset))
        return HamiltonianSideMove(n_steps, step_size=step, total_time=total)
    raise ValueError(f"unknown sampler {kind!r}")


def default_seed() -> int:
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env else 0


@dataclass
class ExperimentConfig:
    """Validated description of one sampling experiment."""

    target_config: dict
    sampler_config: dict
    n_walkers: int
    burn_in: int
    iterations: int
    thin: int = 10
    seed: int = 0
    observable: str = "x1"

    def __post_init__(self):
        if self.burn_in < 0:
            raise ValueError("burn-in must be non-negative")
        if self.iterations < self.thin:
            raise ValueError("iterations must be at least the thinning factor")
        if self.thin < 1:
            raise ValueError("thin must be at least 1")
        if self.n_walkers % 2 != 0 or self.n_walkers < 4:
            raise ValueError("walker count must be even and at least 4")
        if self.observable not in OBSERVABLES:
            raise ValueError(f"unknown observable {self.observable!r}; "
                             f"choose from {sorted(OBSERVABLES)}")

    @classmethod
    def from_dict(cls, config: dict, preset: str | None = None) -> "ExperimentConfig":
        """Build from a flat JSON dict (target + sampler + run fields).

        Budgets come from, in order of precedence: explicit ``burn_in`` /
        ``iterations`` keys, then the named preset, then the full "paper"
        protocol.  ``walkers`` defaults to 2 d, the observable to "x1"
        ("path_integral" for the Allen-Cahn target), the seed to the
        AFFINEMC_SEED environment variable or 0.
        """
        unknown = set(config) - (_TARGET_FIELDS | _SAMPLER_FIELDS | _RUN_FIELDS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if config.get("target") not in _TARGET_KINDS:
            raise ValueError(f"config needs a 'target' entry from {sorted(_TARGET_KINDS)}")
        if config.get("sampler") not in _SAMPLER_KINDS:
            raise ValueError(f"config needs a 'sampler' entry from {sorted(_SAMPLER_KINDS)}")
        if preset is not None and preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        target_config = {k: config[k] for k in _TARGET_FIELDS if k in config}
        sampler_config = {k: config[k] for k in _SAMPLER_FIELDS if k in config}
        burn_default, iter_default = PRESETS[preset] if preset else PRESETS["paper"]
        d = int(config["d"])
        observable = config.get(
            "observable",
            "path_integral" if config["target"] == "allen_cahn" else "x1")
        return cls(
            target_config=target_config,
            sampler_config=sampler_config,
            n_walkers=int(config.get("walkers", 2 * d)),
            burn_in=int(config.get("burn_in", burn_default)),
            iterations=int(config.get("iterations", iter_default)),
            thin=int(config.get("thin", 10)),
            seed=int(config.get("seed", default_seed())),
            observable=observable,
        )


def run_experiment(config: ExperimentConfig, out_dir=None,
                   window_constant: float = 5.0) -> dict:
    """Run one experiment and return (optionally write) its summary.

    When ``out_dir`` is given, writes ``summary.json`` and ``acf.csv``
    (columns lag, rho) there.  The reported tau is in thinned-lag units.
    """
    target = CountingTarget(make_target(config.target_config))
    move = build_move(config.sampler_config)
    plan = rng.RngPlan(config.seed)
    n, d = config.n_walkers, target.dim
    obs_fn = OBSERVABLES[config.observable]

    ensemble = Ensemble(INIT_SCALE * plan.normal_block(0, np.arange(n), rng.INIT, d))
    logp = target.log_density(ensemble.walkers)

    iteration = 0
    for _ in range(config.burn_in):
        ensemble, logp, _ = move.step(ensemble, logp, target, plan, iteration)
        iteration += 1

    target.reset_counts()
    record = ChainRecord(thin=config.thin)
    start = time.perf_counter()
    for _ in range(config.iterations):
        ensemble, logp, stats = move.step(ensemble, logp, target, plan, iteration)
        iteration += 1
        record.update(stats, float(np.mean(obs_fn(ensemble.walkers))))
    wall_time = time.perf_counter() - start

    series = np.asarray(record.series)
    try:
        act = act_from_series(series, c=window_constant, thin=config.thin)
        tau, window, converged, acf = act.tau, act.window, act.converged, act.acf
    except ValueError:
        tau, window, converged, acf = float("nan"), 0, False, np.ones(1)

    denom = config.iterations * n
    summary = {
        "schema": 1,
        "target": config.target_config,
        "sampler": config.sampler_config,
        "d": d,
        "n_walkers": n,
        "burn_in": config.burn_in,
        "iterations": config.iterations,
        "thin": config.thin,
        "seed": config.seed,
        "observable": config.observable,
        "acceptance_rate": record.acceptance_rate,
        "tau": tau,
        "window": window,
        "tau_unconverged": not converged,
        "esjd": record.esjd(n),
        "func_evals_per_iter": target.n_density_evals / denom,
        "grad_evals_per_iter": target.n_grad_evals / denom,
        "wall_time": wall_time,
    }

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "summary.json", "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        n_lags = min(acf.size, 5000)
        with open(out / "acf.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["lag", "rho"])
            for lag in range(n_lags):
                writer.writerow([lag, repr(float(acf[lag]))])
    return summary


def run_scaling_sweep(config: dict, dims, preset: str | None = None,
                      out_path=None) -> list[dict]:
    """Run one experiment per dimension with per-dimension sampler defaults.

    Each run uses N = 2 d walkers and drops any explicit per-dimension step
    parameters (sigma, a) so they rescale with d; the leapfrog budget (T, n)
    carries over unchanged.  Returns one row per dimension with
    (d, sampler, tau, acceptance, tau_unconverged); optionally writes a CSV.
    """
    dims = list(dims)
    if not dims:
        raise ValueError("need at least one dimension")
    if sorted(dims) != dims:
        raise ValueError("dimensions must be sorted ascending")
    rows = []
    for d in dims:
        run_cfg = dict(config)
        run_cfg["d"] = int(d)
        run_cfg["walkers"] = 2 * int(d)
        run_cfg.pop("sigma", None)
        run_cfg.pop("a", None)
        exp = ExperimentConfig.from_dict(run_cfg, preset=preset)
        summary = run_experiment(exp)
        rows.append({
            "d": int(d),
            "sampler": summary["sampler"]["sampler"],
            "tau": summary["tau"],
            "acceptance": summary["acceptance_rate"],
            "tau_unconverged": summary["tau_unconverged"],
        })
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=["d", "sampler", "tau", "acceptance", "tau_unconverged"])
            writer.writeheader()
            writer.writerows(rows)
    return rows
