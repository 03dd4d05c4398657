"""IRS-aided electromagnetic stealth: channel model, reflection design and radar detection."""

from .channel import LosChannel, PathGain, ScenarioGeometry, build_channels, doppler_frequency, los_channel
from .detection import (
    RadarConfig,
    detection_probability,
    marcum_q1,
    snr_factored,
    snr_full,
    synthesize_block,
)
from .estimator import ReflectionDesigner
from .exceptions import ConfigError, InvalidDimensionError, LayoutError, SolverError, StealthError
from .geometry import AnglePair, RadarArrayShape, SurfaceLayout, decompose_response, steering_vector, surface_responses, upa_response
from .harness import LookupTable, SweepResult, build_lookup_table, emit_csv, emit_plot, run_sweep
from .optimizer import (
    SolveReport,
    SolverOptions,
    baseline_reflection,
    solve_dual,
    solve_kkt,
    solve_projected_gradient,
)
from .surface import EchoCoefficients, EwamProfile, IrsState, apply_reflection, build_echo_coefficients

__version__ = "0.1.0"
