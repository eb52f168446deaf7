"""Exception types shared across the package.

Plain ``ValueError`` is used for mathematical domain violations (negative
radius, |m| > l, ...); the classes below separate problems a caller can fix
by changing the run setup from genuine numerical breakdown.
"""


class ConfigurationError(ValueError):
    """Invalid run configuration: unknown family, bad node counts, etc."""


class TruncationError(RuntimeError):
    """A truncated series is inadequate for the requested accuracy."""


class NumericalError(RuntimeError):
    """A quadrature or series evaluation failed to converge."""
