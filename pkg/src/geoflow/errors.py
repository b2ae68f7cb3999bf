"""Exception types shared across the package."""


class GeoflowError(Exception):
    """Base class for all package errors."""


class DomainError(GeoflowError, ValueError):
    """An argument lies outside the domain of a formula."""


class DegenerateTriangleError(DomainError):
    """A triangle collapsed so that a formula divides by zero."""


class BranchError(DomainError):
    """An inverse trigonometric function hit its turning point."""


class ConvergenceError(GeoflowError, RuntimeError):
    """An iterative or adaptive procedure did not converge."""
