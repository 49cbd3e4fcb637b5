"""Quantitative persistency of excitation and certified singular-value bounds for input/state data."""

from .dpc import DpcConfig, predict_one_step, receding_horizon, solve_horizon
from .errors import (
    DimensionError,
    NumericalError,
    ParseError,
    RobustFLError,
    StageError,
    StructuralError,
    UncontrollableError,
    ValidationError,
)
from .excitation import ExcitationReport, design_input, pe_check, scale_input
from .linalg import min_singular_value, numerical_rank, pseudoinverse, singular_values
from .robustness import (
    ExtendedDirection,
    RobustnessCertificate,
    build_M,
    certify,
    estimate_rho0,
    interlacing_gap,
    required_pe_level,
    sigma_theta,
    theta_z,
)
from .signals import Signal, hankel, shift, stack_state_input
from .simulate import NoiseModel, TrajectoryDataset, simulate
from .sysid import PredictorModel, error_bound, ls_estimate
from .system import LtiSystem, double_integrator

__version__ = "0.1.0"
