"""Exception hierarchy shared by every module of the package."""


class GsmError(Exception):
    """Base class for all errors raised by gsmnormal."""


class NonConvergent(GsmError, ArithmeticError):
    """Adaptive quadrature exhausted its subdivision budget."""


class NonFinite(GsmError, ArithmeticError):
    """An integrand or objective produced a NaN or infinity."""


class BadBracket(GsmError, ValueError):
    """The endpoints of a root bracket do not show the promised sign change."""


class DomainError(GsmError, ValueError):
    """An argument lies outside the domain of a function."""


class BadMeasure(GsmError, ValueError):
    """A mixing measure is malformed or cannot be evaluated."""


class NotL2(GsmError, ValueError):
    """The mixture density is not square integrable."""


class Divergent(GsmError, ArithmeticError):
    """An expectation that must be finite is infinite."""


class NotPD(GsmError, ValueError):
    """A matrix failed the positive-definiteness check."""


class NoConvergence(GsmError, ArithmeticError):
    """An iterative solver hit its iteration cap.

    ``residual`` and ``theta`` hold the last residual and damping factor.
    """

    def __init__(self, message, residual=float("nan"), theta=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.theta = theta
        self.iterations = iterations


class McAccuracy(GsmError, ArithmeticError):
    """A Monte Carlo standard error exceeds the requested tolerance."""


class Unsupported(GsmError, NotImplementedError):
    """The requested operation is not available for this kind of measure."""
