class NuwalkError(Exception):
    """Base class for package errors."""


class OutOfSupport(NuwalkError):
    """Amplitude would leave an open lattice."""


class InvalidMomentum(NuwalkError):
    """Momentum is not an allowed lattice value 2*pi*n/(2N+1)."""


class UnnormalizedInput(NuwalkError):
    """Position amplitudes do not have unit norm."""


class StepMismatch(NuwalkError):
    """Kraus families from different time steps were combined."""


class DimensionMismatch(NuwalkError):
    """Operator and state dimensions disagree."""


class InfeasibleAngles(NuwalkError):
    """Mapped coin angles fall outside (0, pi/2)."""


class ConfigError(NuwalkError):
    """Scenario configuration could not be parsed or validated."""


class NumericalError(NuwalkError):
    """A numerical self-check exceeded its tolerance."""
