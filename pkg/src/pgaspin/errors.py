"""Exception hierarchy shared by every module of the package."""


class GAError(Exception):
    """Base class for all errors raised by pgaspin."""


class SignatureMismatchError(GAError, ValueError):
    """Operands live in different algebras."""


class GradeError(GAError, ValueError):
    """An operand does not have the grade structure an operation needs."""


class NullVersorError(GAError, ArithmeticError):
    """A versor norm vanished, so no inverse exists."""


class NotAVersorError(GAError, ValueError):
    """Versor certification failed."""


class DecompositionError(GAError, ArithmeticError):
    """An invariant decomposition could not be completed.

    ``residual`` carries the size of the mismatch that triggered the failure.
    """

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class UnsupportedSignatureError(DecompositionError):
    """Non-real eigenvalue structure, e.g. Cl(2,2)-style bivectors."""


class BranchError(GAError, ArithmeticError):
    """A logarithm was requested at a branch point."""


class NotABladeError(GAError, ValueError):
    """The input cannot be factored into orthogonal vectors."""


class SubalgebraError(GAError, ValueError):
    """An element has components outside the subalgebra of a frame."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class ParseError(GAError, ValueError):
    """Malformed multivector text."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (at column {position})")
        self.position = position
