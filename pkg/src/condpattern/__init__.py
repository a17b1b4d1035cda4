"""Simulation and analysis of conditional two-photon interference from a two-crystal source."""

from .bell import BellSettings, chsh_from_state, chsh_from_visibility, correlation_E, joint_probability
from .biphoton import (
    BiphotonState,
    PathAmplitude,
    PumpSetting,
    apply_signal_hwp,
    coherent_rate,
    concurrence,
    eq1_coefficients,
    make_two_crystal_state,
    project_analyzers,
    pump_split,
)
from .coincidence import (
    CoherenceSetting,
    Pattern,
    ScanConfig,
    poissonize,
    rate_eq2,
    rate_spatial,
    scan_signal,
    scan_waveplate,
    slit_average,
)
from .errors import InvalidInput, InvalidParameter, InvalidState
from .fitting import (
    FitModel,
    FitResult,
    LMOptions,
    fit,
    least_squares,
    model_eval,
    numerical_jacobian,
    visibility_from_fit,
    visibility_raw,
)
from .geometry import OpticalLayout, default_layout, envelope, phase_diff
from .polarization import H, V, JonesMatrix, JonesVector, hwp, polarizer, projection_amplitude

__version__ = "0.1.0"
