"""Exception types shared across the library."""


class NumericalDomainError(ValueError):
    """An input left the numerical domain of an operation.

    Raised for lost positivity, spectra outside the domain of a matrix
    function, and cross-checks between redundant computation routes that
    disagree beyond their stated tolerance.
    """


class ConfigError(ValueError):
    """Base class for experiment configuration problems."""


class ConfigParseError(ConfigError):
    """Configuration text could not be parsed."""


class ConfigValidationError(ConfigError):
    """Configuration parsed but violates the schema."""
