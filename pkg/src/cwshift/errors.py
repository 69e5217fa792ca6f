"""Exception hierarchy shared across the package.

The CLI maps these classes onto exit codes, so new failure modes should
subclass one of the three roots rather than raising bare exceptions.
"""


class CWShiftError(Exception):
    """Base class for all package errors."""


class ValidationError(CWShiftError):
    """Malformed or out-of-contract input (bad degrees, schemas, flags)."""


class AssumptionError(CWShiftError):
    """A genericity or hyperbolicity hypothesis failed on actual data."""


class CommonComponentError(AssumptionError):
    """Two curves share an irreducible component (resultant collapses)."""


class NumericalError(CWShiftError):
    """A numerically required step failed beyond its tolerance."""


class ConditioningError(NumericalError):
    """Interpolation or fitting produced residuals above tolerance."""


class RankDeficiencyError(NumericalError):
    """A nullspace came out smaller than the structure guarantees."""


class DefinitenessError(NumericalError):
    """A block that must be positive definite failed its Cholesky."""


class ConstructionFailedError(NumericalError):
    """The full pipeline failed after exhausting retries and perturbations."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics
