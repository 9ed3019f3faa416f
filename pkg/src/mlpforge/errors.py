"""Exception types shared across the library.

Everything derives from ValueError so callers that don't care about the
distinction can catch the builtin.
"""


class ConfigurationError(ValueError):
    """Invalid network topology or run configuration."""


class DimensionError(ValueError):
    """Vector or dataset dimensions do not match the network."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateSpanError(ValueError):
    """Normalizer fit failed because min equals max on some side."""


class CsvParseError(ValueError):
    """Malformed dataset CSV; the message names the offending line."""


class ModelLoadError(ValueError):
    """Model file is truncated, malformed, or of an unsupported version."""
