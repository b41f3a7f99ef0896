"""Exception types raised by the numerical core."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class StepFailure(RuntimeError):
    """The adaptive ODE integrator could not meet its tolerance."""


class BracketingFailure(RuntimeError):
    """No sign change of the shooting classification was found."""


class MonotonicityViolation(RuntimeError):
    """A computed ground-state profile is not strictly decreasing."""


class WindowTooNarrow(ValueError):
    """Tail-fit window spans less than one decade."""


class PoorFit(RuntimeError):
    """Tail fit residual exceeds its tolerance."""


class QuadratureNonConvergent(RuntimeError):
    """Adaptive quadrature refinement stalled above tolerance."""


class QuadratureAsymmetry(RuntimeError):
    """An analytically-zero symmetric integral came out nonzero."""


class TailDivergent(RuntimeError):
    """Exponent bookkeeping says a tail integral diverges; bad profile."""


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""
