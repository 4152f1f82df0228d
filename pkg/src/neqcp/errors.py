"""Exception types shared across the package."""


class NeqcpError(Exception):
    """Base class for all errors raised by this package."""


class BudgetExceededError(NeqcpError):
    """Adaptive quadrature ran out of its evaluation budget.

    The best estimate obtained so far is kept on the ``estimate``
    attribute together with the error bound at the point of failure,
    so callers can decide whether the partial result is usable.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SingularityError(NeqcpError):
    """An integrand appears non-integrable (estimates diverge under refinement)."""


class RegimeBoundaryError(NeqcpError):
    """Polarization tensor requested exactly on a regime boundary where it diverges."""


class DomainError(NeqcpError):
    """Inputs outside the validity domain of the physical model."""


class BracketError(NeqcpError):
    """Root bracketing failed: no sign change inside the search interval."""


class ConfigError(NeqcpError):
    """Malformed configuration file or inconsistent option set."""
