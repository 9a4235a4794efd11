"""Shared test utilities: oracles, chain drivers, and reference kernels."""

from types import SimpleNamespace

import numpy as np

import affinemc as am


def finite_difference_gradient(target, x, step=1e-5):
    """Central-difference gradient of target.log_density at x."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.empty_like(x)
    for i in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[i] += step
        lo[i] -= step
        grad[i] = (target.log_density(hi) - target.log_density(lo)) / (2 * step)
    return grad


def run_chain(move, target, plan, ensemble, n_iters, start_iteration=0, logp=None,
              observable=None, collect_history=False):
    """Drive a chain, returning final state plus accumulated statistics."""
    if logp is None:
        logp = target.log_density(ensemble.walkers)
    accepted = np.zeros(2, dtype=np.int64)
    proposed = np.zeros(2, dtype=np.int64)
    sq_jump = 0.0
    series = [] if observable is not None else None
    history = [] if collect_history else None
    m = start_iteration
    for _ in range(n_iters):
        ensemble, logp, stats = move.step(ensemble, logp, target, plan, m)
        accepted += stats.accepted
        proposed += stats.proposed
        sq_jump += stats.sq_jump
        if observable is not None:
            series.append(float(np.mean(observable(ensemble.walkers))))
        if collect_history:
            history.append(ensemble.walkers.copy())
        m += 1
    return SimpleNamespace(
        ensemble=ensemble, logp=logp, accepted=accepted, proposed=proposed,
        sq_jump=sq_jump, next_iteration=m,
        acceptance=float(accepted.sum()) / float(proposed.sum()),
        esjd=sq_jump / (n_iters * ensemble.n_walkers),
        series=None if series is None else np.asarray(series),
        history=None if history is None else np.asarray(history))


def stationary_gaussian_start(target, n_walkers, seed):
    """Walkers drawn exactly from a DiagonalGaussian target."""
    draws = np.random.default_rng(seed).standard_normal((n_walkers, target.dim))
    return am.Ensemble(draws / np.sqrt(target.precisions))


def well_conditioned_map(d, seed, cond=4.0):
    """A deterministic invertible map with rotation+scale, condition ~cond."""
    r = np.random.default_rng(seed)
    q1, _ = np.linalg.qr(r.standard_normal((d, d)))
    q2, _ = np.linalg.qr(r.standard_normal((d, d)))
    a = q1 @ np.diag(np.linspace(1.0, cond, d)) @ q2
    return am.AffineMap(a, r.standard_normal(d))


def shear_map(d):
    a = np.eye(d)
    a[0, 1] = 1.0
    return am.AffineMap(a)


def equivariance_gap(move, target, amap, n_walkers, n_steps, seed):
    """Max relative walker deviation between a chain and its affine image.

    Runs the same randomness plan on (target, E0) and on the pushforward
    target from the mapped start; returns max_i |y_i - phi(x_i)|_inf
    relative to 1 + |phi(x_i)|_inf after n_steps iterations.
    """
    plan = am.RngPlan(seed)
    d = target.dim
    x0 = plan.normal_block(0, np.arange(n_walkers), am.INIT, d)
    base = am.Ensemble(x0)
    base_lp = target.log_density(x0)
    mapped_target = am.PushforwardTarget(target, amap)
    y0 = amap(x0)
    mapped = am.Ensemble(y0)
    mapped_lp = mapped_target.log_density(y0)
    for m in range(n_steps):
        base, base_lp, _ = move.step(base, base_lp, target, plan, m)
        mapped, mapped_lp, _ = move.step(mapped, mapped_lp, mapped_target, plan, m)
    expected = amap(base.walkers)
    gap = np.abs(mapped.walkers - expected) / (1.0 + np.abs(expected))
    return float(gap.max())


def reference_df_step(move, ensemble, logp, target, plan, iteration):
    """Per-walker sequential reference for the derivative-free kernels.

    Implements the documented draw contract (partner, move noise, accept
    uniform from each walker's own substreams) walker by walker; proposal
    densities are evaluated in one batch exactly like the vectorized kernel.
    """
    x = ensemble.walkers.copy()
    lp = np.array(logp, copy=True)
    d = ensemble.dim
    accepted = np.zeros(2, dtype=np.int64)
    for s in (0, 1):
        sl = ensemble.group_slice(s)
        comp = x[ensemble.group_slice(1 - s)]
        n_comp = comp.shape[0]
        proposals = np.empty_like(x[sl])
        adjust = np.zeros(sl.stop - sl.start)
        for row, i in enumerate(range(sl.start, sl.stop)):
            xi_pos = x[i]
            if isinstance(move, am.StretchMove):
                u = plan.stream(iteration, i, am.PARTNER).uniforms(1)[0]
                j = min(int(u * n_comp), n_comp - 1)
                uz = plan.stream(iteration, i, am.MOVE).uniforms(1)[0]
                z = am.sample_stretch_z(move.scale_for(d), uz)
                partner = comp[j]
                proposals[row] = partner + z * (xi_pos - partner)
                adjust[row] = (d - 1) * np.log(z)
            elif isinstance(move, am.SideMove):
                u2 = plan.stream(iteration, i, am.PARTNER).uniforms(2)
                j, k = am.rng.distinct_pair(u2[0], u2[1], n_comp)
                if move.noise == "gaussian":
                    noise = plan.stream(iteration, i, am.MOVE).normals(1)[0]
                else:
                    noise = 2.0 * plan.stream(iteration, i, am.MOVE).uniforms(1)[0] - 1.0
                sigma = move.scale_for(d)
                proposals[row] = xi_pos + (sigma * noise) * (comp[int(j)] - comp[int(k)])
            elif isinstance(move, am.WalkMove):
                size = n_comp if move.subset_size is None else move.subset_size
                if size < n_comp:
                    u = plan.stream(iteration, i, am.PARTNER).uniforms(n_comp)
                    subset = comp[np.argsort(u)[:size]]
                else:
                    subset = comp
                centered = subset - subset.mean(axis=0)
                noise = plan.stream(iteration, i, am.MOVE).normals(size)
                proposals[row] = xi_pos + np.einsum("s,sd->d", noise, centered) / np.sqrt(size)
            else:
                raise TypeError(f"unsupported move {move!r}")
        lp_prop = target.log_density(proposals)
        log_ratio = lp_prop - lp[sl] + adjust
        for row, i in enumerate(range(sl.start, sl.stop)):
            u = plan.stream(iteration, i, am.ACCEPT).uniforms(1)[0]
            if np.log(u) < log_ratio[row]:
                x[i] = proposals[row]
                lp[i] = lp_prop[row]
                accepted[s] += 1
    return am.Ensemble(x), lp, accepted
