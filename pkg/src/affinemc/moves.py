"""Derivative-free affine-invariant moves: stretch, side, and walk.

All three propose from relative walker configurations, so their chains
commute with any invertible affine change of coordinates.  Step-size
defaults follow the large-dimension analysis in :mod:`affinemc.limits`:
the coefficients below maximize the limiting expected squared jump distance
on Gaussian targets, and the optimal step scales like 1/sqrt(d).
"""

from __future__ import annotations

import numpy as np

from . import rng
from .base import Move

# Maximizers of the limiting expected squared jump distance (per-dimension
# step coefficients; see limits.optimize_limit, which recovers them).
OPTIMAL_SIDE_STEP = 1.687
OPTIMAL_STRETCH_STEP = 2.151

# With uniform side noise the optimum rescales by sqrt(3/2).
OPTIMAL_UNIFORM_SIDE_STEP = np.sqrt(1.5) * OPTIMAL_STRETCH_STEP


def sample_stretch_z(a: float, u) -> np.ndarray:
    """Inverse-CDF sample of the stretch factor with density g(z) ~ 1/sqrt(z).

    Maps a uniform ``u`` in [0, 1] onto [1/a, a]; u=0 and u=1 hit the support
    endpoints exactly.
    """
    if a <= 1:
        raise ValueError("stretch parameter must exceed 1")
    sqrt_a = np.sqrt(a)
    lo = 1.0 / sqrt_a
    return (lo + np.asarray(u, dtype=np.float64) * (sqrt_a - lo)) ** 2


class StretchMove(Move):
    """Propose along the line through the walker and one complementary partner.

    Proposal x_j + z (x_i - x_j) with z drawn from g(z) ~ 1/sqrt(z) on
    [1/a, a]; the acceptance ratio carries the z^(d-1) volume factor.
    ``a=None`` uses 1 + 2.151/sqrt(d); the classic fixed a=2 suits small d.
    """

    def __init__(self, a: float | None = None):
        if a is not None and a <= 1:
            raise ValueError("stretch parameter must exceed 1")
        self.a = a

    def scale_for(self, dim: int) -> float:
        return self.a if self.a is not None else 1.0 + OPTIMAL_STRETCH_STEP / np.sqrt(dim)

    def _propose_group(self, x_active, active_idx, x_comp, target, plan, iteration):
        n_comp = x_comp.shape[0]
        d = x_active.shape[1]
        u_part = plan.uniform_block(iteration, active_idx, rng.PARTNER, 1)[:, 0]
        j = np.minimum((u_part * n_comp).astype(np.int64), n_comp - 1)
        u_z = plan.uniform_block(iteration, active_idx, rng.MOVE, 1)[:, 0]
        z = sample_stretch_z(self.scale_for(d), u_z)
        partner = x_comp[j]
        proposals = partner + z[:, None] * (x_active - partner)
        return proposals, (d - 1) * np.log(z)


class SideMove(Move):
    """Propose parallel to the side between two distinct complementary walkers.

    Proposal x_i + sigma * xi * (x_j - x_k) with xi standard normal (or
    uniform on [-1, 1]); the proposal is symmetric so the acceptance ratio is
    the plain density ratio.  ``step_scale=None`` uses the optimal
    coefficient over sqrt(d).
    """

    def __init__(self, step_scale: float | None = None, noise: str = "gaussian"):
        if step_scale is not None and step_scale <= 0:
            raise ValueError("step scale must be positive")
        if noise not in ("gaussian", "uniform"):
            raise ValueError("noise must be 'gaussian' or 'uniform'")
        self.step_scale = step_scale
        self.noise = noise

    def scale_for(self, dim: int) -> float:
        if self.step_scale is not None:
            return self.step_scale
        coeff = OPTIMAL_SIDE_STEP if self.noise == "gaussian" else OPTIMAL_UNIFORM_SIDE_STEP
        return coeff / np.sqrt(dim)

    def _propose_group(self, x_active, active_idx, x_comp, target, plan, iteration):
        n_comp = x_comp.shape[0]
        u = plan.uniform_block(iteration, active_idx, rng.PARTNER, 2)
        j, k = rng.distinct_pair(u[:, 0], u[:, 1], n_comp)
        if self.noise == "gaussian":
            xi = plan.normal_block(iteration, active_idx, rng.MOVE, 1)[:, 0]
        else:
            xi = 2.0 * plan.uniform_block(iteration, active_idx, rng.MOVE, 1)[:, 0] - 1.0
        sigma = self.scale_for(x_active.shape[1])
        proposals = x_active + (sigma * xi)[:, None] * (x_comp[j] - x_comp[k])
        return proposals, np.zeros(x_active.shape[0])


class WalkMove(Move):
    """Gaussian proposal with the empirical covariance of a complementary subset.

    Each walker draws a subset S of the complementary group (without
    replacement, default the whole group) and proposes
    x_i + sum_{j in S} (x_j - mean_S) xi_j / sqrt(|S|) with xi_j standard
    normal; this is a symmetric proposal with covariance equal to the subset's
    empirical covariance.
    """

    def __init__(self, subset_size: int | None = None):
        if subset_size is not None and subset_size < 2:
            raise ValueError("subset size must be at least 2")
        self.subset_size = subset_size

    def _propose_group(self, x_active, active_idx, x_comp, target, plan, iteration):
        n_act = x_active.shape[0]
        n_comp = x_comp.shape[0]
        size = n_comp if self.subset_size is None else self.subset_size
        if size > n_comp:
            raise ValueError(f"subset size {size} exceeds complementary group size {n_comp}")
        if size < n_comp:
            # Rank n_comp uniforms per walker; the first `size` ranks form a
            # uniformly random subset without replacement.
            u = plan.uniform_block(iteration, active_idx, rng.PARTNER, n_comp)
            sub = np.argsort(u, axis=1)[:, :size]
            subset = x_comp[sub]                              # (n_act, size, d)
        else:
            subset = np.broadcast_to(x_comp, (n_act,) + x_comp.shape)
        centered = subset - subset.mean(axis=1, keepdims=True)
        xi = plan.normal_block(iteration, active_idx, rng.MOVE, size)
        step = np.einsum("ws,wsd->wd", xi, centered) / np.sqrt(size)
        return x_active + step, np.zeros(n_act)
