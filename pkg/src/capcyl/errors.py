"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain of the requested quantity."""


class DegenerateConfigurationError(DomainError):
    """The cylinder is tangent to the support (alpha ~ 0)."""


class NoIntersectionError(DomainError):
    """The cylinder does not meet the support sphere."""


class ConvergenceError(RuntimeError):
    """An iterative solve failed to reach its tolerance."""


class NoKernelError(ValueError):
    """The linearized operator has trivial kernel at the requested period."""
