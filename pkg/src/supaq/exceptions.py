"""Exception types shared across the toolkit."""


class SupaqError(Exception):
    """Base class for all toolkit errors."""


class InvalidStateError(SupaqError, ValueError):
    """Matrix fails a density-matrix invariant (Hermiticity, trace or positivity)."""


class DimensionMismatchError(SupaqError, ValueError):
    """Operands live on incompatible Hilbert-space dimensions."""


class SingularInputError(SupaqError, ValueError):
    """Operation requires a strictly mixed (full-rank) input."""


class InvalidChannelError(SupaqError, ValueError):
    """Kraus operators do not define a trace-preserving channel."""


class DegenerateConfigurationError(SupaqError, ValueError):
    """Geometric construction has no solution for this configuration."""


class ParameterError(SupaqError, ValueError):
    """Parameter outside its documented domain."""


class CombinatorialLimitError(SupaqError, ValueError):
    """Exhaustive search would exceed the configured size cap."""


class UnsupportedCopyCountError(ParameterError):
    """Finite-copy capacity estimates cover n in {1, 2} only."""
