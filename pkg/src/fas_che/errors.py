"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised when a requested configuration is inconsistent or infeasible."""


class NumericalError(RuntimeError):
    """Raised when a linear-algebra step fails (singular or indefinite matrix,
    non-finite intermediate)."""
