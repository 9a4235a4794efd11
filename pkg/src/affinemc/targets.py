"""Benchmark target distributions behind one log-density / gradient contract.

Every target is an unnormalized density pi proportional to exp(-V), exposing
``log_density`` (= -V up to an additive constant) and ``grad_log_density``
(= -grad V), both vectorized over leading axes: a point is a length-d vector
and a batch is any array of shape (..., d).
"""

from __future__ import annotations

import numpy as np

from .ensemble import AffineMap


class Target:
    """Log-density + gradient contract for an unnormalized density on R^d.

    ``grad_log_density`` must return a fresh array (callers may modify it
    in place).
    """

    dim: int

    def log_density(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad_log_density(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise ValueError(f"point dimension {x.shape[-1]} != target dimension {self.dim}")
        return x


class DiagonalGaussian(Target):
    """Zero-mean Gaussian with diagonal precision matrix."""

    def __init__(self, precisions):
        precisions = np.asarray(precisions, dtype=np.float64)
        if precisions.ndim != 1 or precisions.size < 1:
            raise ValueError("precisions must be a non-empty 1-d array")
        if np.any(precisions <= 0):
            raise ValueError("precisions must be positive")
        self.precisions = precisions
        self._neg_precisions = -precisions
        self.dim = precisions.size

    @classmethod
    def with_condition(cls, dim: int, condition: float) -> "DiagonalGaussian":
        """Precision eigenvalues spaced linearly from 0.1 to 0.1 * condition."""
        if condition < 1:
            raise ValueError("condition number must be at least 1")
        return cls(np.linspace(0.1, 0.1 * condition, dim))

    @classmethod
    def standard(cls, dim: int) -> "DiagonalGaussian":
        """The isotropic unit Gaussian."""
        return cls(np.ones(dim))

    def log_density(self, x):
        x = self._check(x)
        return -0.5 * ((x * x) @ self.precisions)

    def grad_log_density(self, x):
        x = self._check(x)
        return self._neg_precisions * x


class Ring(Target):
    """Density concentrated on the unit sphere shell, exp(-(|x|^2 - 1)^2 / l^2)."""

    def __init__(self, dim: int, width: float = 0.25):
        if width <= 0:
            raise ValueError("width must be positive")
        self.dim = int(dim)
        self.width = float(width)

    def log_density(self, x):
        x = self._check(x)
        r2 = np.sum(x * x, axis=-1)
        return -((r2 - 1.0) ** 2) / self.width**2

    def grad_log_density(self, x):
        x = self._check(x)
        r2 = np.sum(x * x, axis=-1)
        return -4.0 * (r2 - 1.0)[..., None] * x / self.width**2


class AllenCahn(Target):
    """Invariant measure of the stochastic Allen-Cahn equation on [0, 1].

    A function u is represented by its values on d equispaced grid nodes
    (both endpoints included, spacing dx = 1/(d-1)).  The negative log-density
    is the discretized energy

        sum_i (u_{i+1} - u_i)^2 / (2 dx)  +  dx * sum_i w_i (1 - u_i^2)^2

    with trapezoid weights w_i (1/2 at the endpoints, 1 inside).  Endpoints
    are free, which is the standard finite-difference form of natural
    (Neumann) boundary conditions.
    """

    def __init__(self, dim: int):
        if dim < 2:
            raise ValueError("need at least 2 grid points")
        self.dim = int(dim)
        self.dx = 1.0 / (dim - 1)
        self._weights = np.ones(dim)
        self._weights[0] = self._weights[-1] = 0.5

    def log_density(self, u):
        u = self._check(u)
        du = np.diff(u, axis=-1)
        grad_term = np.sum(du * du, axis=-1) / (2.0 * self.dx)
        well = (1.0 - u * u) ** 2
        pot_term = self.dx * np.sum(self._weights * well, axis=-1)
        return -(grad_term + pot_term)

    def grad_log_density(self, u):
        u = self._check(u)
        e = np.diff(u, axis=-1) / self.dx          # e_j = (u_{j+1} - u_j)/dx
        g = np.zeros_like(u)
        g[..., :-1] -= e
        g[..., 1:] += e                            # d(grad term)/du_i = e_{i-1} - e_i
        g += self.dx * self._weights * 4.0 * u * (u * u - 1.0)
        return -g


def path_integral(u) -> np.ndarray:
    """Trapezoid quadrature of grid values u over [0, 1] (the mean of u)."""
    u = np.asarray(u, dtype=np.float64)
    d = u.shape[-1]
    if d < 2:
        raise ValueError("need at least 2 grid points")
    dx = 1.0 / (d - 1)
    return dx * (np.sum(u, axis=-1) - 0.5 * (u[..., 0] + u[..., -1]))


class PushforwardTarget(Target):
    """The image of a target under an affine change of coordinates.

    If x ~ pi and y = A x + b then ``log_density(y) = pi.log_density(x)`` up
    to the constant log|det A|, which cancels in every acceptance ratio, and
    ``grad_log_density(y) = A^{-T} grad_x``.
    """

    def __init__(self, base: Target, amap: AffineMap):
        if amap.dim != base.dim:
            raise ValueError("map dimension does not match target dimension")
        self.base = base
        self.amap = amap
        self._inv = amap.inverse()
        self.dim = base.dim

    def log_density(self, y):
        return self.base.log_density(self._inv(y))

    def grad_log_density(self, y):
        g = self.base.grad_log_density(self._inv(y))
        return g @ self._inv.matrix          # rows times A^{-1} == (A^{-T} g)^T


class CountingTarget(Target):
    """Wrapper that counts density and gradient evaluations (one per point)."""

    def __init__(self, base: Target):
        self.base = base
        self.dim = base.dim
        self.n_density_evals = 0
        self.n_grad_evals = 0

    @staticmethod
    def _n_points(x) -> int:
        x = np.asarray(x)
        return 1 if x.ndim == 1 else int(np.prod(x.shape[:-1]))

    def log_density(self, x):
        self.n_density_evals += self._n_points(x)
        return self.base.log_density(x)

    def grad_log_density(self, x):
        self.n_grad_evals += self._n_points(x)
        return self.base.grad_log_density(x)

    def reset_counts(self):
        self.n_density_evals = 0
        self.n_grad_evals = 0


def make_target(config: dict) -> Target:
    """Build a target from a CLI-style configuration dict.

    Recognized values of ``config["target"]``:

    - ``"gaussian"``: keys ``d``, ``kappa`` (condition number)
    - ``"standard_gaussian"``: key ``d``
    - ``"ring"``: keys ``d``, ``l`` (well width)
    - ``"allen_cahn"``: key ``d`` (grid size)
    """
    kind = config.get("target")
    if kind == "gaussian":
        return DiagonalGaussian.with_condition(int(config["d"]), float(config["kappa"]))
    if kind == "standard_gaussian":
        return DiagonalGaussian.standard(int(config["d"]))
    if kind == "ring":
        return Ring(int(config["d"]), float(config.get("l", 0.25)))
    if kind == "allen_cahn":
        return AllenCahn(int(config["d"]))
    raise ValueError(f"unknown target {kind!r}")
