"""Exception hierarchy shared by the library and the command line front end."""


class BuckBoundsError(Exception):
    """Base class for every error raised deliberately by this package."""


class InvalidParameterError(BuckBoundsError, ValueError):
    """An argument is outside the documented domain of an operation."""


class SpectrumFormatError(BuckBoundsError, ValueError):
    """A spectrum file or text block does not follow the expected format."""


class DomainViolationError(BuckBoundsError, ValueError):
    """An eigenvalue violates the admissibility condition lam**(1/(l-1)) > n - 2."""


class InfeasibleSpectrumError(BuckBoundsError, ValueError):
    """The input values cannot be the leading eigenvalues of any admissible spectrum."""


class InternalConsistencyError(BuckBoundsError):
    """A structural invariant that should hold by construction was violated."""


class NumericalError(BuckBoundsError):
    """A numerical procedure failed to produce a trustworthy result."""


class NotPositiveDefiniteError(NumericalError):
    """Cholesky factorization met a nonpositive pivot.

    The attribute ``index`` records the failing pivot position and ``pivot``
    its value.
    """

    def __init__(self, message, index, pivot):
        super().__init__(message)
        self.index = index
        self.pivot = pivot


class ConvergenceError(NumericalError):
    """An iterative eigenvalue or root computation did not converge."""


class BracketError(NumericalError):
    """Root bracketing failed within the allowed expansion range."""
