"""Deterministic counter-based random streams.

Every random number consumed by the samplers is addressed by the tuple
``(master_seed, iteration, walker, role, draw_index)`` and is a pure function
of that address.  No generator state is shared between walkers, so a group of
walkers can be updated in any order -- or in parallel -- and the result is
identical.  It also means two runs that share a :class:`RngPlan` consume
*exactly* the same randomness, which is what makes the affine-equivariance
regression in the test suite an exact comparison rather than a statistical
one.

Draw-order contract
-------------------
Within one walker update the roles are consumed in this order:

1. ``PARTNER``  -- partner walker indices / subset selection,
2. ``MOVE``     -- proposal noise (stretch factor, side noise, momenta),
3. ``ACCEPT``   -- the Metropolis uniform.

Each role is an independent substream; walker ``i`` always reads its own
streams from draw index 0.  All uniforms lie in the open interval (0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

# Draw roles, in the order a single walker update consumes them.
INIT = 0      # initial walker positions (used once by the experiment runner)
PARTNER = 1   # partner / subset selection from the complementary group
MOVE = 2      # proposal noise: stretch z, side xi, momenta
ACCEPT = 3    # Metropolis accept/reject uniform

_U64 = np.uint64
_MASK = 0xFFFFFFFFFFFFFFFF
_GOLD = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_SH30 = _U64(30)
_SH27 = _U64(27)
_SH31 = _U64(31)
_SH11 = _U64(11)
_HALF = 0.5
_INV53 = 2.0 ** -53


def _mix(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, vectorized over uint64 arrays."""
    with np.errstate(over="ignore"):  # uint64 arithmetic wraps by design
        x = (x ^ (x >> _SH30)) * _MIX1
        x = (x ^ (x >> _SH27)) * _MIX2
        return x ^ (x >> _SH31)


def _stream_key(seed: int, iteration: int, walker, role: int) -> np.ndarray:
    """Hash (seed, iteration, walker, role) into a 64-bit stream key.

    ``walker`` may be a scalar or an integer array; the result broadcasts.
    """
    if iteration < 0:
        raise ValueError("iteration must be non-negative")
    with np.errstate(over="ignore"):
        h = _mix(_U64(seed & _MASK) + _GOLD)
        h = _mix(h ^ (_U64(iteration) + _GOLD))
        w = np.asarray(walker, dtype=np.uint64)
        h = _mix(h ^ (w + _GOLD))
        return _mix(h ^ (_U64(role) + _GOLD))


def _raw(key: np.ndarray, index: np.ndarray) -> np.ndarray:
    """Draw ``index`` of the stream with the given key (uint64 output)."""
    idx = np.asarray(index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(key + (idx + _U64(1)) * _GOLD)


def _to_uniform(bits: np.ndarray) -> np.ndarray:
    """Map uint64 words to doubles in the open interval (0, 1)."""
    return ((bits >> _SH11).astype(np.float64) + _HALF) * _INV53


class Stream:
    """Sequential reader over one (seed, iteration, walker, role) substream."""

    __slots__ = ("_key", "_pos")

    def __init__(self, key: np.uint64):
        self._key = key
        self._pos = 0

    def uniforms(self, count: int) -> np.ndarray:
        idx = np.arange(self._pos, self._pos + count)
        self._pos += count
        return _to_uniform(_raw(self._key, idx))

    def normals(self, count: int) -> np.ndarray:
        return ndtri(self.uniforms(count))

    def integers(self, count: int, upper: int) -> np.ndarray:
        """``count`` integers uniform on {0, ..., upper - 1}."""
        u = self.uniforms(count)
        return np.minimum((u * upper).astype(np.int64), upper - 1)


@dataclass(frozen=True)
class RngPlan:
    """Randomness plan for a run: a master seed plus the derivation rule.

    ``stream`` hands out one substream; the ``*_block`` helpers evaluate the
    first ``count`` draws of many walkers' substreams at once (row ``i`` of a
    block equals the first draws of ``stream(iteration, walkers[i], role)``).
    """

    master_seed: int = 0

    def stream(self, iteration: int, walker: int, role: int) -> Stream:
        return Stream(_stream_key(self.master_seed, iteration, int(walker), role))

    def uniform_block(self, iteration: int, walkers, role: int, count: int) -> np.ndarray:
        """Uniform draws, shape ``(len(walkers), count)``, open interval (0, 1)."""
        keys = _stream_key(self.master_seed, iteration, walkers, role)
        idx = np.arange(count, dtype=np.uint64)
        return _to_uniform(_raw(keys[:, None], idx[None, :]))

    def normal_block(self, iteration: int, walkers, role: int, count: int) -> np.ndarray:
        """Standard-normal draws, shape ``(len(walkers), count)``."""
        return ndtri(self.uniform_block(iteration, walkers, role, count))


def distinct_pair(u0: np.ndarray, u1: np.ndarray, upper: int) -> tuple[np.ndarray, np.ndarray]:
    """Map two uniforms to an ordered pair of distinct integers below ``upper``.

    Exactly uniform over ordered pairs (j, k) with j != k, consuming one
    uniform each.  ``upper`` must be at least 2.
    """
    if upper < 2:
        raise ValueError("need at least two candidates to draw a distinct pair")
    j = np.minimum((u0 * upper).astype(np.int64), upper - 1)
    k = np.minimum((u1 * (upper - 1)).astype(np.int64), upper - 2)
    k = k + (k >= j)
    return j, k
