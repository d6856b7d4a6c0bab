"""Vacuum radiation from a dissipative bosonic mode with a modulated coupling near criticality."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    IntegrationError,
    InvalidParameterError,
    InvalidStateError,
    NumericalError,
    OutOfRegimeError,
    SingularSystemError,
    SupercriticalError,
    UndefinedAngleError,
    ValidationError,
    VacradError,
)
from .model import (  # noqa: E402
    DerivedQuantities,
    ModelParams,
    char_poly,
    critical_coupling,
    derived,
    effective_frequency,
    physical_scale,
    resonant_drive,
    thermal_occupation,
    validate,
)
