"""Error types raised by the solver, grid, and extraction layers."""


class NvaporError(Exception):
    """Base class for all package-specific errors."""


class SingularSystem(NvaporError):
    """Steady-state linear system is rank-deficient beyond the trace constraint.

    Carries optional context (velocity, detuning) attached by sweep callers.
    """

    def __init__(self, message: str, velocity: float | None = None,
                 detuning: float | None = None):
        super().__init__(message)
        self.velocity = velocity
        self.detuning = detuning


class InvalidGrid(NvaporError):
    """Velocity-grid construction arguments violate a precondition."""


class EmptyGrid(NvaporError):
    """A velocity cutoff excluded every quadrature node."""


class DegenerateReference(NvaporError):
    """Optical-depth calibration got a non-positive reference absorption."""


class NoFeature(NvaporError):
    """No contiguous region of the spectrum exceeds the noise floor."""


class LengthMismatch(NvaporError):
    """Multiplet offsets and weights have different lengths."""


class StepTooLarge(NvaporError):
    """Time integrator trace drifted by more than 1e-8 in a single step."""


class ConfigError(NvaporError):
    """Scenario configuration failed to parse or validate."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
