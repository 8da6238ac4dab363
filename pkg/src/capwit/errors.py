"""Exception hierarchy shared across the package."""


class CapwitError(Exception):
    """Base class for all package errors."""


class ValidationError(CapwitError):
    """An object violates a structural invariant (shape, hermiticity, normalization)."""


class DomainError(CapwitError):
    """A numeric parameter is outside its admissible range."""


class DataError(CapwitError):
    """Measured data is inconsistent beyond the tolerated noise level."""


class ConfigError(CapwitError):
    """A configuration value is unusable (e.g. too few bootstrap resamples)."""
