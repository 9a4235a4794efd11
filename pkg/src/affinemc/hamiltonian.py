"""Hamiltonian moves: standard HMC and its ensemble-preconditioned variants.

All three samplers integrate the dynamics dx/dt = B p, dp/dt = -B^T grad V
with a leapfrog scheme and Metropolis-correct the endpoint.  They differ only
in the preconditioner B:

- standard HMC: B = I (momentum lives in R^d),
- Hamiltonian walk move: B = normalized centered complementary ensemble
  (momentum dimension = subset size, default the whole half-group),
- Hamiltonian side move: B = one normalized difference of two complementary
  walkers (scalar momentum).

Since composing the leapfrog with a momentum flip is an involution, detailed
balance holds with acceptance min{1, exp(-Delta H)}.  The two ensemble
variants commute with affine coordinate changes; standard HMC does not.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .base import Move
from .targets import Target

# Eigenvalues of B^T B below this are treated as exact zeros.
_NULL_SPACE_TOL = 1e-12


def _resolve_step(n_steps: int, step_size, total_time) -> float:
    if n_steps < 1:
        raise ValueError("need at least one leapfrog step")
    if (step_size is None) == (total_time is None):
        raise ValueError("give exactly one of step_size or total_time")
    h = float(step_size) if step_size is not None else float(total_time) / n_steps
    if h <= 0:
        raise ValueError("step size must be positive")
    return h


def leapfrog(x, p, basis, target: Target, step_size: float, n_steps: int):
    """Integrate n leapfrog steps of dx/dt = B p, dp/dt = -B^T grad V.

    ``x`` is (w, d), ``p`` is (w, D); ``basis`` is the shared (d, D)
    preconditioner B, or None for the identity (D = d).  Returns the endpoint
    (x_n, p_n) with the momentum *not* flipped; the caller applies the flip.
    Costs exactly n + 1 gradient evaluations (the inner full kicks fuse two
    half kicks).  Non-finite values propagate to the output, where the caller
    treats them as a rejection.
    """
    h = float(step_size)
    x = np.array(x, dtype=np.float64, copy=True)
    p = np.array(p, dtype=np.float64, copy=True)
    # grad_log_density is -grad V, so kicks carry a plus sign.
    if basis is None:
        g = target.grad_log_density(x)
        g *= 0.5 * h
        p += g
        for step in range(n_steps):
            x += h * p
            g = target.grad_log_density(x)
            g *= h if step < n_steps - 1 else 0.5 * h
            p += g
        return x, p
    basis = np.asarray(basis, dtype=np.float64)
    kick = np.empty_like(p)
    move = np.empty_like(x)
    np.matmul(target.grad_log_density(x), basis, out=kick)
    kick *= 0.5 * h
    p += kick
    for step in range(n_steps):
        np.matmul(p, basis.T, out=move)
        move *= h
        x += move
        np.matmul(target.grad_log_density(x), basis, out=kick)
        kick *= h if step < n_steps - 1 else 0.5 * h
        p += kick
    return x, p


def leapfrog_along(x, p, directions, target: Target, step_size: float, n_steps: int):
    """Leapfrog with a per-walker single-column preconditioner.

    ``directions`` is (w, d): row i is walker i's direction vector, and the
    momentum ``p`` is scalar per walker, shape (w,).  Equivalent to calling
    :func:`leapfrog` per walker with B = directions[i][:, None].
    """
    h = float(step_size)
    x = np.array(x, dtype=np.float64, copy=True)
    p = np.array(p, dtype=np.float64, copy=True)
    move = np.empty_like(x)
    project = lambda g: np.einsum("wd,wd->w", directions, g)
    p += 0.5 * h * project(target.grad_log_density(x))
    for step in range(n_steps):
        np.multiply(directions, (h * p)[:, None], out=move)
        x += move
        kick = h if step < n_steps - 1 else 0.5 * h
        p += kick * project(target.grad_log_density(x))
    return x, p


def _kinetic(p: np.ndarray) -> np.ndarray:
    p = np.atleast_2d(p)
    return 0.5 * np.sum(p * p, axis=-1)


class Hmc(Move):
    """Standard HMC with identity mass matrix, run per walker independently.

    Not affine invariant: its performance depends on the target's
    conditioning, which is exactly what the ensemble variants fix.
    """

    needs_gradient = True

    def __init__(self, n_steps: int, step_size: float | None = None,
                 total_time: float | None = None):
        self.n_steps = int(n_steps)
        self.step_size = _resolve_step(self.n_steps, step_size, total_time)

    def _propose_group(self, x_active, active_idx, x_comp, target, plan, iteration):
        d = x_active.shape[1]
        p = plan.normal_block(iteration, active_idx, rng.MOVE, d)
        x_new, p_new = leapfrog(x_active, p, None, target, self.step_size, self.n_steps)
        return x_new, _kinetic(p) - _kinetic(p_new)


class HamiltonianWalkMove(Move):
    """HMC preconditioned by the centered complementary ensemble.

    B has one column per complementary walker in the chosen subset,
    (x_j - mean_S)/sqrt(|S|); momenta live in R^{|S|}.  B is built once per
    half-group update and shared by every walker in the group (it depends
    only on the frozen complement).  Default subset: the whole half-group.
    """

    needs_gradient = True

    def __init__(self, n_steps: int, step_size: float | None = None,
                 total_time: float | None = None, subset_size: int | None = None):
        self.n_steps = int(n_steps)
        self.step_size = _resolve_step(self.n_steps, step_size, total_time)
        if subset_size is not None and subset_size < 2:
            raise ValueError("subset size must be at least 2")
        self.subset_size = subset_size

    def _propose_group(self, x_active, active_idx, x_comp, target, plan, iteration):
        n_comp = x_comp.shape[0]
        size = n_comp if self.subset_size is None else self.subset_size
        if size > n_comp:
            raise ValueError(f"subset size {size} exceeds complementary group size {n_comp}")
        if size < n_comp:
            # One shared subset per half-group, drawn from the stream of the
            # group's first walker (B is shared, so its randomness is too).
            u = plan.uniform_block(iteration, active_idx[:1], rng.PARTNER, n_comp)[0]
            subset = x_comp[np.argsort(u)[:size]]
        else:
            subset = x_comp
        basis = (subset - subset.mean(axis=0)).T / np.sqrt(size)   # (d, size)
        p = plan.normal_block(iteration, active_idx, rng.MOVE, size)
        x_new, p_new = leapfrog(x_active, p, basis, target, self.step_size, self.n_steps)
        return x_new, _kinetic(p) - _kinetic(p_new)


class HamiltonianSideMove(Move):
    """HMC along the side between two distinct complementary walkers.

    Each walker draws its own pair (x_j, x_k), integrates along the single
    direction (x_j - x_k)/sqrt(2 d) with a scalar momentum, and
    accepts/rejects independently.  Motion is confined to that line.
    """

    needs_gradient = True

    def __init__(self, n_steps: int, step_size: float | None = None,
                 total_time: float | None = None):
        self.n_steps = int(n_steps)
        self.step_size = _resolve_step(self.n_steps, step_size, total_time)

    def _propose_group(self, x_active, active_idx, x_comp, target, plan, iteration):
        n_comp = x_comp.shape[0]
        d = x_active.shape[1]
        u = plan.uniform_block(iteration, active_idx, rng.PARTNER, 2)
        j, k = rng.distinct_pair(u[:, 0], u[:, 1], n_comp)
        directions = (x_comp[j] - x_comp[k]) / np.sqrt(2.0 * d)
        p = plan.normal_block(iteration, active_idx, rng.MOVE, 1)[:, 0]
        x_new, p_new = leapfrog_along(x_active, p, directions, target,
                                      self.step_size, self.n_steps)
        return x_new, 0.5 * p * p - 0.5 * p_new * p_new


def gaussian_log_accept(x0, p0, basis, step_size: float, n_steps: int) -> float:
    """Closed-form log acceptance ratio for the isotropic unit Gaussian.

    For V(x) = |x|^2 / 2 the preconditioned leapfrog is an explicit rotation
    in the eigenbasis of B^T B: writing qbar for the rotated B^T x
    coordinates, the shadow energy |qbar|^2 / (2 lamhat^2) + |pbar|^2 / 2 is
    conserved exactly, which yields the log Metropolis ratio

        (h^2 / 8) * sum_i (|qbar0_i|^2 - |qbarn_i|^2)

    without running the integrator.  Independent cross-check for
    :func:`leapfrog`; requires the stability bound h <= 2 / lambda_max.  For
    an anisotropic Gaussian, whiten the coordinates first.
    """
    basis = np.asarray(basis, dtype=np.float64)
    if basis.ndim != 2:
        raise ValueError("basis must be a (d, D) matrix")
    x0 = np.asarray(x0, dtype=np.float64)
    p0 = np.asarray(p0, dtype=np.float64)
    if n_steps == 0:
        return 0.0
    h = float(step_size)
    lam2, vecs = np.linalg.eigh(basis.T @ basis)
    lam2 = np.where(lam2 > _NULL_SPACE_TOL, lam2, 0.0)
    lam_max = np.sqrt(lam2.max())
    if lam_max > 0 and h > 2.0 / lam_max:
        raise ValueError(f"step size {h} violates the stability bound {2.0 / lam_max:.6g}")
    qbar0 = vecs.T @ (basis.T @ x0)
    pbar0 = vecs.T @ p0
    live = lam2 > 0
    lam2 = lam2[live]
    q0, pb0 = qbar0[live], pbar0[live]
    phi = np.arccos(np.clip(1.0 - 0.5 * h * h * lam2, -1.0, 1.0))
    lam_hat = np.sqrt(lam2 / (1.0 - 0.25 * h * h * lam2))
    qn = np.cos(n_steps * phi) * q0 + lam_hat * np.sin(n_steps * phi) * pb0
    return float(h * h / 8.0 * np.sum(q0 * q0 - qn * qn))
