"""
Domain Layer: Exceptions raised by the asymptotics toolkit.
Every failure the services can signal derives from Dp3Error so that the
management commands can map them onto a single exit code.
"""


class Dp3Error(Exception):
    """Base class for all toolkit errors."""


class InvalidParameters(Dp3Error):
    """Raised when (a, b, ε) or a truncation order is unusable."""


class InvalidCase(Dp3Error):
    """Raised when monodromy data does not belong to the case an operation requires."""


class DegeneratePoint(Dp3Error):
    """Raised for manifold points with g11 = g22 = 0."""


class InadmissibleLabel(Dp3Error):
    """Raised for symmetry or regime labels outside the admissible lists."""


class DomainError(Dp3Error):
    """Raised when an index lies outside the domain of a formula."""


class SingularStep(Dp3Error):
    """
    Raised when the DP3E right-hand side is evaluated next to a pole
    (u close to 0) or next to the origin.
    """

    def __init__(self, message, tau=None, u=None):
        super().__init__(message)
        self.tau = tau
        self.u = u


class ExportError(Dp3Error):
    """Raised when an artifact cannot be written or read back."""
