"""Exact and quasi-analytical solutions: Thacker bowl, solitary wave, stationary flows."""

from .fields import SampledFields
from .rk4 import rk4_march, rk4_step
from .soliton import SolitonParams, SolitonSampler, soliton_state
from .stationary import (
    BUMP_FLOW,
    DIP_FLOW,
    StationarySampler,
    StationarySolution,
    StationarySpec,
    generate_stationary,
    solution_residual,
    stationary_ode_residual,
)
from .thacker import (
    ThackerParams,
    ThackerSampler,
    ThackerTrajectory,
    integrate_f,
    thacker_depth_averaged,
    thacker_fields,
    thacker_pressure,
)
