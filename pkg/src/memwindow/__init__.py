"""Window-function memristor models: driven dynamics, period averaging and attractors."""

__version__ = "0.1.0"

from .attractor import (
    FixedPointKind,
    FixedPointReport,
    PotentialCurve,
    PulseStrengths,
    averaged_rhs,
    biolek_fixed_point_general,
    biolek_xa_closed_form,
    find_fixed_point,
    potential,
    pulse_strengths,
    section_crossing,
    sweep_section,
    sweep_xa,
)
from .device import Activation, ActivationKind, MemristorModel, memristance, state_rate
from .drive import Layout, PulseTrain, Sinusoid, Triangle, sample, segments
from .errors import (
    BracketError,
    ConfigError,
    DivergenceError,
    DomainError,
    LengthError,
    NotPiecewiseConstant,
    NumericalError,
    ValidationError,
)
from .sim import SimConfig, Trajectory, detect_limit_cycle, integrate, moving_average
from .windows import WindowClassKind, WindowKind, WindowSpec, classify_window, eval_biolek, eval_joglekar
