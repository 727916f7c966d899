"""Exception hierarchy for the parametric wave lab."""


class ParametricError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ParametricError):
    """Invalid or unreadable configuration (CLI exit code 2)."""


class NumericError(ParametricError):
    """Numerical failure during simulation or analysis (CLI exit code 3)."""


class StepTooLargeError(NumericError):
    """Fixed step does not resolve the fastest oscillation."""


class NonFiniteError(NumericError):
    """A simulated sample overflowed or became NaN."""


class TruncationBreachError(NumericError):
    """Population of the Fock cutoff shell exceeds the trust level."""


class NotGrowingError(NumericError):
    """Envelope regression found no clean exponential growth."""


class TooShortError(NumericError):
    """Record has too few samples for spectral analysis."""


class ZeroCouplingError(ParametricError):
    """The coupling product vanishes, so no pump threshold exists."""


class InvalidScenarioError(ParametricError):
    """Configuration contradicts the requested energy-flow scenario."""
