"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class SingularMatrixError(ValueError):
    """A matrix is (numerically) rank deficient where full rank is required."""


class InsufficientSamplesError(ValueError):
    """Too few samples for the requested estimator."""


class EstimationError(RuntimeError):
    """A Monte-Carlo estimate could not be formed reliably."""


class ConfigurationError(ValueError):
    """A scenario or run configuration violates a hard constraint."""
