"""Exception hierarchy shared by every module of the package."""


class FDSylvesterError(Exception):
    """Base class for all package errors."""


class ValidationError(FDSylvesterError, ValueError):
    """Inputs violate a documented precondition or invariant."""


class DimensionError(ValidationError):
    """Matrix dimensions are odd or not conformable."""


class StartupError(ValidationError):
    """A three-level scheme was given no startup row u^1."""


class PreconditionError(ValidationError):
    """The operation does not apply to this scheme or system."""


class ConvergenceError(FDSylvesterError, ArithmeticError):
    """An iterative kernel hit its iteration cap.

    The best residual reached is kept on ``residual``.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class SingularMatrixError(FDSylvesterError, ArithmeticError):
    """A pivot (or determinant) vanished within tolerance."""


class NonUniqueError(SingularMatrixError):
    """The Sylvester operator is (numerically) singular.

    ``gap`` is the smallest |lambda_a + lambda_b| that was observed.
    """

    def __init__(self, message, gap=float("nan")):
        super().__init__(message)
        self.gap = gap


class DegeneratePairError(FDSylvesterError, ArithmeticError):
    """Both diagonal weights of a min-norm cell are zero."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
