"""Exception types shared across the package."""


class ContractViolationError(ValueError):
    """An operation was called with inputs that break its preconditions."""


class ConfigurationError(ValueError):
    """A parameter combination is invalid before any work starts."""


class NumericalFailureError(RuntimeError):
    """A numerical routine failed to converge or an exact identity broke."""
