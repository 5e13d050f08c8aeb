"""Exception types shared across the package."""


class ActionLabError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(ActionLabError, ValueError):
    """Inputs disagree about the ambient dimension."""


class InadmissibleTauError(ActionLabError, ValueError):
    """Smoothing parameter violates tau > 0 and 1 + tau*lambda > 0."""


class OutsideDomainError(ActionLabError, ValueError):
    """A point lies outside the domain the operation requires."""


class SolverError(ActionLabError, RuntimeError):
    """An iterative solver stopped before reaching its target residual."""


class ConfigError(ActionLabError, ValueError):
    """Malformed configuration value or serialized document."""
