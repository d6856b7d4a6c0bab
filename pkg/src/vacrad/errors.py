"""Exception hierarchy shared by every module."""


class VacradError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(VacradError, ValueError):
    """A physical parameter lies outside its admissible range."""


class SupercriticalError(InvalidParameterError):
    """The static coupling exceeds the critical coupling."""


class ValidationError(InvalidParameterError):
    """One or more ModelParams invariants are violated.

    ``violations`` holds ``(field, message)`` pairs, one per broken constraint.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{field}: {msg}" for field, msg in self.violations)
        super().__init__(f"invalid model parameters: {lines}")


class DomainError(VacradError, ValueError):
    """A function was evaluated outside its domain."""


class OutOfRegimeError(DomainError):
    """A closed-form expression was requested outside its validity regime."""


class InvalidStateError(VacradError, ValueError):
    """A covariance matrix does not describe a physical Gaussian state."""


class UndefinedAngleError(VacradError, ValueError):
    """The anomalous correlation vanishes, so no squeezing angle exists."""


class NumericalError(VacradError, ArithmeticError):
    """Base class for failures of a numerical procedure."""


class SingularSystemError(NumericalError):
    """A linear system is singular to working precision."""


class ConvergenceError(NumericalError):
    """An iterative refinement did not converge within its budget."""


class IntegrationError(NumericalError):
    """Quadrature or ODE integration failed."""
