"""Spectral toolkit for a 2D derivative NLS model with off-axis dispersion.

Periodic pseudo-spectral discretization, Newton-Krylov stationary states,
IMEX/integrating-factor time stepping with conservation and resolution
monitors, a catalog of reproducible experiment presets, and a small CLI.
"""

from .spectral import (
    Field,
    Grid,
    ModelParams,
    SymbolField,
    apply_nonlinearity,
    build_grid,
    dealias_mask,
    forward_transform,
    gamma_symbol,
    inverse_transform,
    krasny_filter,
    l_symbol,
    p_symbol,
    resolution_indicator,
    rhs_spectral,
)
from .profiles import amplitude_1d, dnls_limit_profile, phase_1d, profile_1d
from .krylov import NoConvergence, gmres_solve
from .stationary import (
    ContinuationSchedule,
    ContinuationStalled,
    ConvergedToZero,
    MaxIterExceeded,
    StationaryProblem,
    StationaryState,
    continuation_solve,
    delta2_schedule,
    fixed_point_residual,
    initial_iterate,
    jacobian_vector_product,
    newton_solve,
    newton_residual_history,
    steepening_schedule,
)
from .evolution import (
    FrameState,
    IllConditionedFrame,
    IntegratorConfig,
    MonitorConfig,
    RunRecord,
    RunState,
    RunStatus,
    Sample,
    conserved_functional,
    evolve,
    moving_frame_velocity,
    observed_order,
    step,
)
from .presets import (
    Preset,
    PresetResult,
    gaussian_data,
    get_preset,
    list_presets,
    perturbed_state_data,
    run_preset,
    stationary_state_for,
)

__version__ = "0.1.0"
