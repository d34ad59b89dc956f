"""Exception hierarchy shared by the solver modules."""


class QesError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(QesError, ValueError):
    """An argument lies outside the domain of an operation."""


class DegenerateParametersError(QesError, ArithmeticError):
    """A closed-form denominator vanishes (to within a relative epsilon)."""


class NotMappableError(QesError):
    """A confined solution cannot be continued to the half line."""


class BracketFailure(QesError):
    """No energy bracket with the requested node count could be found."""


class GridFailure(QesError):
    """Numerical integration produced non-finite values."""


class ResolutionError(QesError):
    """Finite-difference eigenvalues did not settle under grid refinement."""
