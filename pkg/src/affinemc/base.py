"""Shared half-group update machinery for all ensemble moves.

One iteration updates the two half-groups in sequence.  While a group
updates, the complementary group is a frozen snapshot: group 0 proposals read
the ensemble as it stood at the start of the iteration, group 1 proposals
read group 0 as just updated.  Walkers within a group never read each other,
so their updates commute; combined with the counter-based randomness in
:mod:`affinemc.rng` the result of an iteration is a pure function of
(positions, plan, iteration).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .ensemble import Ensemble
from .targets import Target


@dataclass
class StepStats:
    """Per-iteration accounting: acceptance per group and total squared jump."""

    accepted: np.ndarray   # shape (2,), accepted proposals per half-group
    proposed: np.ndarray   # shape (2,)
    sq_jump: float         # sum over walkers of |x_new - x_old|^2


class Move:
    """Base class: one MCMC transition kernel over an ensemble.

    Subclasses implement :meth:`_propose_group`, producing proposals for one
    half-group from the frozen complementary positions, plus any log-weight
    correction to the Metropolis ratio beyond the density difference (the
    stretch move's Jacobian term, the Hamiltonian moves' kinetic-energy
    difference).  Rejected walkers keep their positions bit-for-bit.
    """

    needs_gradient = False

    def step(self, ensemble: Ensemble, log_density: np.ndarray, target: Target,
             plan: rng.RngPlan, iteration: int) -> tuple[Ensemble, np.ndarray, StepStats]:
        """Advance the whole ensemble by one iteration.

        ``log_density`` is the cached target log-density of the current
        walkers (pass ``target.log_density(ensemble.walkers)`` on the first
        call); the updated cache is returned alongside the new ensemble.
        """
        x = ensemble.walkers.copy()
        logp = np.array(log_density, dtype=np.float64, copy=True)
        accepted = np.zeros(2, dtype=np.int64)
        proposed = np.zeros(2, dtype=np.int64)
        sq_jump = 0.0

        for s in (0, 1):
            sl = ensemble.group_slice(s)
            comp = ensemble.group_slice(1 - s)
            idx = np.arange(sl.start, sl.stop)
            with np.errstate(over="ignore", invalid="ignore", under="ignore"):
                proposals, adjust = self._propose_group(
                    x[sl], idx, x[comp], target, plan, iteration)
                logp_prop = target.log_density(proposals)
                log_ratio = (logp_prop - logp[sl]) + adjust
            u = plan.uniform_block(iteration, idx, rng.ACCEPT, 1)[:, 0]
            accept = np.log(u) < log_ratio
            if np.any(accept):
                delta = proposals[accept] - x[sl][accept]
                sq_jump += float(np.sum(delta * delta))
                x[sl][accept] = proposals[accept]
                logp[sl][accept] = logp_prop[accept]
            accepted[s] = int(np.count_nonzero(accept))
            proposed[s] = idx.size

        return Ensemble(x), logp, StepStats(accepted, proposed, sq_jump)

    def _propose_group(self, x_active, active_idx, x_comp, target, plan, iteration):
        """Return (proposals, log_ratio_adjust) for one half-group."""
        raise NotImplementedError
