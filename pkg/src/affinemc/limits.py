"""Large-dimension limits of acceptance rates and squared jump distances.

For Gaussian targets the acceptance probability and the expected squared
jump distance (ESJD) of every sampler in this package converge, as the
dimension grows, to low-dimensional expectations.  This module evaluates
those limits numerically -- by Monte Carlo over the limiting variables, and
by quadrature against the Marchenko-Pastur law for the ensemble-
preconditioned walk move -- so they can serve as independent oracles for the
samplers and as the source of the optimal step-size coefficients.

Scalings at a glance (isotropic unit Gaussian, d -> infinity):

- side move, sigma = alpha/sqrt(d):   log-ratio -> -alpha^2 xi^2 - sqrt(2) alpha xi z
- stretch move, a = 1 + beta/sqrt(d): log-ratio -> -(3/2) beta^2 U^2 - sqrt(3) beta U z
- Hamiltonian walk move, h = alpha d^(-1/4), walkers N with d/(N/2) -> rho:
  log-ratio -> N(alpha^4 mu_rho, alpha^4 var_rho) with Marchenko-Pastur moments
- Hamiltonian side move, h = alpha < 2 fixed: see :func:`hside_limit`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtr

from . import rng

_SHARD = 1 << 20


@dataclass(frozen=True)
class LimitEstimate:
    """A Monte-Carlo limit value with its standard error."""

    value: float
    std_error: float
    n_samples: int


class _Accumulator:
    """Streaming mean/standard-error accumulator for paired MC samples."""

    def __init__(self, width: int):
        self.sums = np.zeros(width)
        self.sqs = np.zeros(width)
        self.n = 0

    def add(self, *columns):
        for i, col in enumerate(columns):
            self.sums[i] += col.sum()
            self.sqs[i] += (col * col).sum()
        self.n += columns[0].size

    def estimate(self, i: int) -> LimitEstimate:
        mean = self.sums[i] / self.n
        var = max(self.sqs[i] / self.n - mean * mean, 0.0)
        return LimitEstimate(float(mean), float(np.sqrt(var / self.n)), self.n)


def _check_mc_size(n_mc: int):
    if n_mc < 1000:
        raise ValueError("need at least 1000 Monte Carlo samples")


def _min1exp(log_ratio: np.ndarray) -> np.ndarray:
    return np.exp(np.minimum(log_ratio, 0.0))


def side_limit(alpha: float, n_mc: int = 10_000_000, noise: str = "gaussian",
               seed: int = 0) -> tuple[LimitEstimate, LimitEstimate]:
    """Limiting (acceptance, ESJD) of the side move at per-dim step alpha.

    Monte-Carlo over the limiting pair (xi, z); ``noise="uniform"`` replaces
    xi by Unif[-1, 1].  Deterministic given (seed, n_mc).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    _check_mc_size(n_mc)
    plan = rng.RngPlan(seed)
    acc = _Accumulator(2)
    shard = 0
    while acc.n < n_mc:
        k = min(_SHARD, n_mc - acc.n)
        if noise == "gaussian":
            xi = plan.stream(shard, 0, rng.MOVE).normals(k)
        elif noise == "uniform":
            xi = 2.0 * plan.stream(shard, 0, rng.MOVE).uniforms(k) - 1.0
        else:
            raise ValueError("noise must be 'gaussian' or 'uniform'")
        z = plan.stream(shard, 1, rng.MOVE).normals(k)
        w = _min1exp(-(alpha * xi) ** 2 - np.sqrt(2.0) * alpha * xi * z)
        acc.add(w, 2.0 * (alpha * xi) ** 2 * w)
        shard += 1
    return acc.estimate(0), acc.estimate(1)


def stretch_limit(beta: float, n_mc: int = 10_000_000,
                  seed: int = 0) -> tuple[LimitEstimate, LimitEstimate]:
    """Limiting (acceptance, ESJD) of the stretch move at a = 1 + beta/sqrt(d)."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    _check_mc_size(n_mc)
    plan = rng.RngPlan(seed)
    acc = _Accumulator(2)
    shard = 0
    while acc.n < n_mc:
        k = min(_SHARD, n_mc - acc.n)
        u = 2.0 * plan.stream(shard, 0, rng.MOVE).uniforms(k) - 1.0
        z = plan.stream(shard, 1, rng.MOVE).normals(k)
        w = _min1exp(-1.5 * (beta * u) ** 2 - np.sqrt(3.0) * beta * u * z)
        acc.add(w, 2.0 * (beta * u) ** 2 * w)
        shard += 1
    return acc.estimate(0), acc.estimate(1)


def optimize_limit(objective, lo: float, hi: float, tol: float = 1e-3,
                   ) -> tuple[float, float]:
    """Golden-section maximization of a deterministic limit curve.

    ``objective`` should use common random numbers (a fixed seed) so repeated
    evaluations are noiseless; the search then behaves as on a smooth
    function.  Raises if the maximum sits at a bracket endpoint.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    invphi = (5.0**0.5 - 1.0) / 2.0
    a, b = float(lo), float(hi)
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = objective(x1), objective(x2)
    while b - a > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = objective(x2)
    best = 0.5 * (a + b)
    if best - lo < 2 * tol or hi - best < 2 * tol:
        raise ValueError("maximum at a bracket endpoint; the bracket does not "
                         "contain an interior maximum")
    return best, objective(best)


class MPLaw:
    """The Marchenko-Pastur law at aspect ratio rho in [0, 1).

    Density (1 / (2 pi rho lam)) sqrt((c - lam)(lam - b)) on [b, c] with
    b = (1 - sqrt(rho))^2 and c = (1 + sqrt(rho))^2; a point mass at 1 when
    rho = 0.  Integration substitutes lam = b + (c - b) sin^2(theta), which
    removes the inverse-square-root edge singularities.
    """

    def __init__(self, ratio: float):
        if not 0 <= ratio < 1:
            raise ValueError("aspect ratio must lie in [0, 1)")
        self.ratio = float(ratio)
        self.lower = (1.0 - np.sqrt(self.ratio)) ** 2
        self.upper = (1.0 + np.sqrt(self.ratio)) ** 2
        err = abs(self.integrate(lambda lam: np.ones_like(lam)) - 1.0)
        if err > 1e-8:
            raise RuntimeError(f"quadrature failed the normalization self-check ({err:.3g})")

    def integrate(self, f) -> float:
        """Integral of f against the law, via adaptive quadrature."""
        if self.ratio == 0.0:
            return float(f(1.0))
        b, c = self.lower, self.upper
        span = c - b

        def theta_integrand(theta):
            st, ct = np.sin(theta), np.cos(theta)
            lam = b + span * st * st
            return f(lam) * span * span * st * st * ct * ct / (np.pi * self.ratio * lam)

        value, _ = quad(theta_integrand, 0.0, np.pi / 2.0,
                        epsabs=1e-12, epsrel=1e-11, limit=200)
        return value


def mp_moments(ratio: float, total_time: float) -> tuple[float, float]:
    """Drift and variance coefficients of the walk-move log-ratio limit.

    Returns (mu, var) where the limiting log acceptance ratio at step
    coefficient alpha is Gaussian with mean alpha^4 * mu and variance
    alpha^4 * var:

        mu  = -(1/32) integral lam^2 sin^2(sqrt(lam) T) d nu_rho
        var =  (1/16) integral lam^2 sin^2(sqrt(lam) T) d nu_rho

    Note var = -2 mu, so exp of the limiting log-ratio has unit expectation,
    as detailed balance requires of exp(-Delta H) at stationarity.  At
    rho = 0 they reduce to -sin^2(T)/32 and sin^2(T)/16.
    """
    law = MPLaw(ratio)
    t = float(total_time)
    second = law.integrate(lambda lam: lam * lam * np.sin(np.sqrt(lam) * t) ** 2)
    return -second / 32.0, second / 16.0


def gaussian_min1_exp(mean: float, sd: float) -> float:
    """E[min(1, exp(G))] for G ~ N(mean, sd^2), in closed form."""
    if sd == 0:
        return float(min(1.0, np.exp(mean)))
    return float(ndtr(mean / sd) + np.exp(mean + 0.5 * sd * sd) * ndtr(-mean / sd - sd))


def hwalk_limit(alpha: float, ratio: float, total_time: float = 1.0,
                n_mc: int = 1_000_000, seed: int = 0,
                ) -> tuple[LimitEstimate, LimitEstimate]:
    """Limiting (acceptance, per-dimension ESJD) of the Hamiltonian walk move.

    At h = alpha * d^(-1/4), n = T/h, and walker count N with d/(N/2) -> rho,
    the log acceptance ratio converges to N(alpha^4 mu, alpha^4 var) with the
    Marchenko-Pastur moments; the squared jump per dimension converges to
    4 * integral sin^2(sqrt(lam) T / 2) d nu_rho times the acceptance.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    _check_mc_size(n_mc)
    mu, var = mp_moments(ratio, total_time)
    mean = alpha**4 * mu
    sd = alpha**2 * np.sqrt(var)
    plan = rng.RngPlan(seed)
    acc = _Accumulator(1)
    shard = 0
    while acc.n < n_mc:
        k = min(_SHARD, n_mc - acc.n)
        g = mean + sd * plan.stream(shard, 0, rng.MOVE).normals(k)
        acc.add(_min1exp(g))
        shard += 1
    acceptance = acc.estimate(0)
    law = MPLaw(ratio)
    t = float(total_time)
    jump = 4.0 * law.integrate(lambda lam: np.sin(0.5 * np.sqrt(lam) * t) ** 2)
    esjd = LimitEstimate(jump * acceptance.value, jump * acceptance.std_error,
                         acceptance.n_samples)
    return acceptance, esjd


def hside_limit(alpha: float, n_steps: int, n_mc: int = 1_000_000,
                seed: int = 0) -> tuple[LimitEstimate, LimitEstimate]:
    """Limiting (acceptance, ESJD) of the Hamiltonian side move.

    Valid for constant step size h = alpha < 2 (the stability bound of the
    leapfrog rotation) and n leapfrog steps.  With
    phi = arccos(1 - alpha^2/2), z1 ~ N(0, 1) and
    z2 ~ N(0, 1/(1 - alpha^2/4)) independent, the limiting log-ratio is

        P = (alpha^2/8) (sin^2(n phi) (z1^2 - z2^2) - sin(2 n phi) z1 z2)

    and the squared jump converges to Q * min{1, exp(P)} with

        Q = (cos(n phi) - 1)^2 z1^2 + sin^2(n phi) z2^2
            + 2 (cos(n phi) - 1) sin(n phi) z1 z2.
    """
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    _check_mc_size(n_mc)
    phi = np.arccos(1.0 - 0.5 * alpha * alpha)
    sn = np.sin(n_steps * phi)
    s2n = np.sin(2 * n_steps * phi)
    cn = np.cos(n_steps * phi)
    z2_scale = 1.0 / np.sqrt(1.0 - 0.25 * alpha * alpha)
    plan = rng.RngPlan(seed)
    acc = _Accumulator(2)
    shard = 0
    while acc.n < n_mc:
        k = min(_SHARD, n_mc - acc.n)
        z1 = plan.stream(shard, 0, rng.MOVE).normals(k)
        z2 = z2_scale * plan.stream(shard, 1, rng.MOVE).normals(k)
        p = alpha * alpha / 8.0 * (sn * sn * (z1 * z1 - z2 * z2) - s2n * z1 * z2)
        q = ((cn - 1.0) ** 2 * z1 * z1 + sn * sn * z2 * z2
             + 2.0 * (cn - 1.0) * sn * z1 * z2)
        w = _min1exp(p)
        acc.add(w, q * w)
        shard += 1
    return acc.estimate(0), acc.estimate(1)
