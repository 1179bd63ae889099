"""Exception hierarchy shared by all modules.

Validation problems (bad parameters, states outside the unit interval) derive
from :class:`ValidationError`; failures of a numerical procedure derive from
:class:`NumericalError`.  The CLI maps the two families onto exit codes 2 and 3.
"""


class MemwindowError(Exception):
    pass


class ValidationError(MemwindowError, ValueError):
    pass


class DomainError(ValidationError):
    """A state value lies outside [0, 1] by more than the clamp tolerance."""


class ConfigError(ValidationError):
    pass


class NotPiecewiseConstant(MemwindowError):
    """Raised by ``segments`` for waveforms that need time stepping."""


class NumericalError(MemwindowError, ArithmeticError):
    pass


class DivergenceError(NumericalError):
    pass


class BracketError(NumericalError):
    pass


class LengthError(ValidationError):
    """A trajectory is too short for the requested analysis."""
