"""
Exception hierarchy for polar-reading
"""


class PolarReadingError(ValueError):
    """Base class for every error raised by the library."""


class NotHermitianError(PolarReadingError):
    pass


class PsdViolationError(PolarReadingError):
    pass


class TraceViolationError(PolarReadingError):
    pass


class DimensionMismatchError(PolarReadingError):
    pass


class InvalidParameterError(PolarReadingError):
    """A scalar parameter (gamma, prior, Bloch vector, beta, ...) is out of range."""


class CapacityExceededError(PolarReadingError):
    """A size cap was exceeded; the message names the environment variable that raises it."""


class ZeroProbabilityPrefixError(PolarReadingError):
    pass


class IncompletePrefixCoverageError(PolarReadingError):
    pass


class ModelMismatchError(PolarReadingError):
    pass


class InfeasibleConstructionError(PolarReadingError):
    pass


class DecoderAbortError(PolarReadingError):
    pass


class ConfigError(PolarReadingError):
    pass
