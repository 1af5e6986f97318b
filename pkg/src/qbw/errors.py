"""Exception types shared across the package."""


class QbwError(Exception):
    """Base class for all package errors."""


class ShapeError(QbwError, ValueError):
    """Matrix or index dimensions are inconsistent with the operation."""


class DomainError(QbwError, ValueError):
    """A parameter is outside the range the operation is defined on."""


class BasisError(QbwError, ValueError):
    """A measurement basis is incomplete or not orthonormal."""


class MultipleCoherences(QbwError, ValueError):
    """More than one independent off-diagonal element was found."""


class ZeroWeight(QbwError, ValueError):
    """Projection onto the reduced basis carries negligible weight."""


class ConvergenceError(QbwError, RuntimeError):
    """A numerical minimization failed to converge after all restarts."""
