"""Walker ensembles, affine maps, and chain bookkeeping."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Condition numbers beyond this are treated as numerically singular.
_MAX_CONDITION = 1e14


class Ensemble:
    """An ordered set of N walker positions in R^d.

    N must be even and at least 4.  Walkers are partitioned by index into two
    fixed half-groups: the first N/2 walkers and the last N/2.  The partition
    never changes over the life of a chain; proposals for one group only read
    positions from the other.
    """

    __slots__ = ("walkers",)

    def __init__(self, walkers):
        walkers = np.ascontiguousarray(walkers, dtype=np.float64)
        if walkers.ndim != 2:
            raise ValueError("walkers must be a 2-d array of shape (n, d)")
        n, d = walkers.shape
        if n < 4 or n % 2 != 0:
            raise ValueError(f"need an even number of walkers, at least 4 (got {n})")
        if d < 1:
            raise ValueError("walker dimension must be at least 1")
        if not np.all(np.isfinite(walkers)):
            raise ValueError("walker positions must be finite")
        self.walkers = walkers

    @property
    def n_walkers(self) -> int:
        return self.walkers.shape[0]

    @property
    def dim(self) -> int:
        return self.walkers.shape[1]

    @property
    def half_size(self) -> int:
        return self.n_walkers // 2

    def group_slice(self, s: int) -> slice:
        """Index slice of half-group ``s`` (0 or 1)."""
        h = self.half_size
        return slice(0, h) if s == 0 else slice(h, self.n_walkers)

    def __repr__(self) -> str:
        return f"Ensemble(n_walkers={self.n_walkers}, dim={self.dim})"


def split_halves(ensemble: Ensemble) -> tuple[range, range]:
    """The two disjoint index ranges covering all walkers.

    Each range is the complement of the other; together they cover 0..N.
    """
    h = ensemble.half_size
    return range(0, h), range(h, ensemble.n_walkers)


class AffineMap:
    """An invertible affine change of coordinates x -> A x + b."""

    __slots__ = ("matrix", "offset")

    def __init__(self, matrix, offset=None):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("matrix must be square")
        d = matrix.shape[0]
        offset = np.zeros(d) if offset is None else np.asarray(offset, dtype=np.float64)
        if offset.shape != (d,):
            raise ValueError("offset length must match matrix size")
        cond = np.linalg.cond(matrix)
        if not np.isfinite(cond) or cond > _MAX_CONDITION:
            raise ValueError(f"matrix is singular or near-singular (condition number {cond:.3g})")
        self.matrix = matrix
        self.offset = offset

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Apply the map to a point (d,) or batch of points (..., d)."""
        return np.asarray(points, dtype=np.float64) @ self.matrix.T + self.offset

    def inverse(self) -> "AffineMap":
        inv = np.linalg.solve(self.matrix, np.eye(self.dim))
        return AffineMap(inv, -inv @ self.offset)


def apply_affine(ensemble: Ensemble, amap: AffineMap) -> Ensemble:
    """Map every walker through ``amap``, preserving order."""
    if amap.dim != ensemble.dim:
        raise ValueError(f"map dimension {amap.dim} != ensemble dimension {ensemble.dim}")
    return Ensemble(amap(ensemble.walkers))


@dataclass
class ChainRecord:
    """Accumulated statistics of one sampling run.

    The observable series keeps one entry per ``thin`` iterations (so its
    length is floor(iterations / thin)); acceptance counters and the squared
    jump accumulator cover every iteration.
    """

    thin: int = 1
    iterations: int = 0
    accepted: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=np.int64))
    proposed: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=np.int64))
    sq_jump_total: float = 0.0
    series: list = field(default_factory=list)

    def __post_init__(self):
        if self.thin < 1:
            raise ValueError("thin must be at least 1")

    def update(self, stats, observable_value: float):
        """Fold in one iteration's statistics; record the observable on stride."""
        self.iterations += 1
        self.accepted += stats.accepted
        self.proposed += stats.proposed
        self.sq_jump_total += stats.sq_jump
        if self.iterations % self.thin == 0:
            self.series.append(float(observable_value))
        if np.any(self.accepted > self.proposed) or np.any(self.accepted < 0):
            raise RuntimeError("acceptance counters out of range")

    @property
    def acceptance_rate(self) -> float:
        total = int(self.proposed.sum())
        return float(self.accepted.sum()) / total if total else float("nan")

    def esjd(self, n_walkers: int) -> float:
        """Mean squared jump distance per walker per iteration."""
        if self.iterations < 1:
            raise ValueError("no iterations recorded")
        return self.sq_jump_total / (self.iterations * n_walkers)


def save_ensemble(ensemble: Ensemble, path, seed: int = 0, iteration: int = 0) -> None:
    """Write an ensemble to ``path``: one JSON header line, then raw float64.

    The payload is the (n, d) walker array, row-major, little-endian.
    """
    header = {"n": ensemble.n_walkers, "d": ensemble.dim,
              "seed": int(seed), "iteration": int(iteration)}
    with open(path, "wb") as fh:
        fh.write((json.dumps(header) + "\n").encode("ascii"))
        fh.write(ensemble.walkers.astype("<f8").tobytes())


def load_ensemble(path) -> tuple[Ensemble, dict]:
    """Read an ensemble written by :func:`save_ensemble`; returns (ensemble, header)."""
    raw = Path(path).read_bytes()
    nl = raw.index(b"\n")
    header = json.loads(raw[:nl].decode("ascii"))
    n, d = header["n"], header["d"]
    walkers = np.frombuffer(raw[nl + 1:], dtype="<f8", count=n * d).reshape(n, d)
    return Ensemble(walkers.copy()), header
