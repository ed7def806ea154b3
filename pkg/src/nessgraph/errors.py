"""Exception hierarchy shared by all nessgraph modules."""


class NessError(Exception):
    """Base class for errors raised by nessgraph."""


class ShapeError(NessError, ValueError):
    """Raised when a matrix has the wrong shape for an operation."""


class ValidationError(NessError, ValueError):
    """Raised when inputs violate a documented precondition."""


class NumericalError(NessError, ArithmeticError):
    """Raised when a decomposition fails; carries diagnostics."""

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = dict(diagnostics or {})


class LimitError(NessError, ValueError):
    """Raised when a problem exceeds a configured size limit."""


class ModelFormatError(NessError, ValueError):
    """Raised when a model or report file cannot be parsed.

    ``line`` and ``column`` are 1-based when the failure has a position.
    """

    def __init__(self, msg, line=None, column=None):
        if line is not None:
            msg = f"{msg} (line {line}, column {column})"
        super().__init__(msg)
        self.line = line
        self.column = column


class InconsistencyError(NessError):
    """A sufficient criterion and the oracle disagree.

    Every implication checked by the oracle is a theorem, so this always
    signals a bug or a tolerance problem, never a physical effect.
    """

    def __init__(self, msg, record=None):
        super().__init__(msg)
        self.record = record
