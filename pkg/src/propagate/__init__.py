"""Spreading speeds, fronts and forced waves for reaction-diffusion models in a shifting habitat."""

from .analysis import (Verdict, annihilation_verdict, attractivity_verdict, build_majorant,
                       build_minorant, estimate_speed, propagation_probe, sandwich_check,
                       spreading_verdict, track_front, wave_tail_verdict)
from .config import RunConfig, parse_config
from .errors import ConfigError, HypothesisError, NumericError, PropagateError
from .grid import DelayHistory, Field, Grid1D, Trajectory, grid_from_spacing, make_grid
from .models import (CooperativeModel, ScalarShiftModel, builtin_cooperative_pair, builtin_fisher,
                     builtin_shifted_logistic, builtin_shifted_ricker, tabulated_scalar_model,
                     verify_assumptions)
from .sim import SimConfig, diffusion_step, ic_bump_h, ic_xi, ic_xi_tilde, run
from .speeds import Speeds, principal_root, spreading_speed
from .waves import WaveProfile, solve_forced_wave, solve_steady_state, steady_residual

__version__ = "0.1.0"
