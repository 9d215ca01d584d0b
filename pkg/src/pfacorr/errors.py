"""Exception and warning types shared across the package.

The CLI maps these onto exit codes: usage problems exit 2, domain and
geometry problems exit 3, numerical failures exit 4.
"""


class PfaCorrError(Exception):
    """Base class for all library errors."""

    exit_code = 4


class DomainError(PfaCorrError, ValueError):
    """An input lies outside the domain of an operation."""

    exit_code = 3


class GeometryError(DomainError):
    """Surfaces touch or cross, or a geometry is degenerate."""


class UnsupportedConfigurationError(DomainError):
    """A boundary-condition pair or profile combination is not supported."""


class NumericalError(PfaCorrError, ArithmeticError):
    """A numerical procedure failed or produced an unusable result."""


class TruncationError(NumericalError):
    """Multipole truncation too aggressive for the requested geometry."""


class ConstructionError(NumericalError):
    """A Padé linear system is singular or too ill-conditioned."""


class PoleError(NumericalError):
    """A rational approximant has a pole inside the requested range."""


class FitError(NumericalError):
    """A least-squares or small-k fit is rank deficient or unreliable."""


class MatchingViolation(NumericalError):
    """A perturbative matching relation is violated beyond tolerance."""

    def __init__(self, relation, residual, tolerance):
        self.relation = relation
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"matching relation {relation} violated: residual {residual:.3e} "
            f"exceeds tolerance {tolerance:.1e}")


class ValidityWarning(UserWarning):
    """A result is computed outside the regime where the model is trusted."""
