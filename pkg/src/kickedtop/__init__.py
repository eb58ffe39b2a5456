"""Kicked-top sensor toolkit: Floquet dynamics in the Dicke basis, subsystem
quantum Fisher information, classical chaos diagnostics, and sweep tooling."""

__version__ = "0.1.0"

from .analysis import (CharacteristicTimes, ScalingFit, characteristic_times,
                       default_time_grid, fit_power_law, slope_transition)
from .classical import (ClassicalPoint, LyapunovEstimate, is_regular_orbit,
                        jacobian, lyapunov, map_step, orbit, phase_portrait,
                        sphere_grid)
from .config import (ExperimentConfig, InitialState, desk_config, full_config,
                     load_config)
from .errors import ConfigError, NumericsError
from .floquet import (Propagator, Snapshot, build_propagator, evolve,
                      load_checkpoint, save_checkpoint, step)
from .qfi import (QfiRecord, SpectralDecomposition, fractional_qfi, mixed_qfi,
                  pure_qfi, spectral_decomposition)
from .reduction import ReducedDensity, reduce_state, weight, weight_table
from .spinops import (CollectiveOperator, DickeState, SpinBasis, build_operator,
                      coherent_state, rotation_generator, variance)

__all__ = [
    "__version__",
    "CharacteristicTimes", "ScalingFit", "characteristic_times",
    "default_time_grid", "fit_power_law", "slope_transition",
    "ClassicalPoint", "LyapunovEstimate", "is_regular_orbit", "jacobian",
    "lyapunov", "map_step", "orbit", "phase_portrait", "sphere_grid",
    "ExperimentConfig", "InitialState", "desk_config", "full_config", "load_config",
    "ConfigError", "NumericsError",
    "Propagator", "Snapshot", "build_propagator", "evolve",
    "load_checkpoint", "save_checkpoint", "step",
    "QfiRecord", "SpectralDecomposition", "fractional_qfi", "mixed_qfi",
    "pure_qfi", "spectral_decomposition",
    "ReducedDensity", "reduce_state", "weight", "weight_table",
    "CollectiveOperator", "DickeState", "SpinBasis", "build_operator",
    "coherent_state", "rotation_generator", "variance",
]
