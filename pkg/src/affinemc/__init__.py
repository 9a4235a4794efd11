"""Affine-invariant ensemble MCMC samplers and their large-dimension oracles.

Derivative-free moves (stretch, side, walk), ensemble-preconditioned
Hamiltonian moves (walk, side) plus standard HMC for comparison, chain
diagnostics (autocorrelation time, ESJD), and numerical evaluation of the
samplers' dimension-free limiting acceptance/ESJD curves.
"""

from .base import Move, StepStats
from .diagnostics import (ActEstimate, act_from_series, autocovariance, esjd,
                          ensemble_observable_series, integrated_act, normalized_acf)
from .ensemble import (AffineMap, ChainRecord, Ensemble, apply_affine,
                       load_ensemble, save_ensemble, split_halves)
from .hamiltonian import (HamiltonianSideMove, HamiltonianWalkMove, Hmc,
                          gaussian_log_accept, leapfrog, leapfrog_along)
from .limits import (LimitEstimate, MPLaw, gaussian_min1_exp, hside_limit,
                     hwalk_limit, mp_moments, optimize_limit, side_limit,
                     stretch_limit)
from .moves import (OPTIMAL_SIDE_STEP, OPTIMAL_STRETCH_STEP, SideMove,
                    StretchMove, WalkMove, sample_stretch_z)
from .rng import ACCEPT, INIT, MOVE, PARTNER, RngPlan, Stream
from .runner import (OBSERVABLES, PRESETS, ExperimentConfig, build_move,
                     run_experiment, run_scaling_sweep)
from .targets import (AllenCahn, CountingTarget, DiagonalGaussian,
                      PushforwardTarget, Ring, Target, make_target,
                      path_integral)

__version__ = "0.1.0"
