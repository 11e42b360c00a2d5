"""Exception and warning types raised by chebforge."""


class ChebError(Exception):
    """Base class for domain errors (CLI exit status 1)."""


class ContractError(ChebError, ValueError):
    """An argument violates an operation's precondition."""


class BasisMismatchError(ContractError):
    """Two series in different bases were combined."""


class DomainError(ChebError, ValueError):
    """A root lies on the branch cut / expansion interval."""


class UnboundedFunctionError(DomainError):
    """The inverse polynomial has a pole in (or too close to) the domain."""


class IterationLimitError(ChebError, RuntimeError):
    """An iterative method did not converge within its iteration cap."""


class InconsistentDecompositionError(ChebError, ArithmeticError):
    """A partial-fraction decomposition failed its reconstruction check."""


class DegenerateDenominatorError(ChebError, ZeroDivisionError):
    """The leading Chebyshev coefficient of a denominator vanishes."""


class IndexMismatchError(ContractError):
    """Division states passed to a recursion step are not consecutive."""


class NearRootError(ChebError, ArithmeticError):
    """The banded system is singular or too ill-conditioned to trust."""

    def __init__(self, message, rcond=None):
        super().__init__(message)
        self.rcond = rcond


class StalledFitError(ChebError, ArithmeticError):
    """The Newton iteration hit a singular Jacobian.

    ``last`` carries the last iterate as a :class:`~chebforge.relerr.FitResult`.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class SingularPointError(ChebError, ZeroDivisionError):
    """The denominator polynomial vanishes at a sample abscissa."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class NonEquioscillatingError(ChebError, ArithmeticError):
    """Too few extrema of the relative error to equilibrate."""


class UnknownFunctionError(ChebError, KeyError):
    """No catalog entry is registered under the requested name."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class TruncatedInputWarning(UserWarning):
    """A numerator series was shorter than the truncation index; zeros were used."""


class PrecisionWarning(UserWarning):
    """A requested quantity lies below native 64-bit resolution."""
