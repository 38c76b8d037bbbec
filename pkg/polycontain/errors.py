"""
Exception hierarchy for polycontain.

LP outcomes such as infeasible or unbounded are reported as a status on
``optimize.Solution``; the exceptions below cover bad input and failures
that leave no usable answer.
"""


class PolycontainError(Exception):
    """Base class for every error raised by this package"""


class InvalidInputError(PolycontainError, ValueError):
    """Input arrays or options are malformed (shape, finiteness, flags)"""


class DimensionMismatchError(InvalidInputError):
    """Two operands live in different ambient dimensions"""

    def __init__(self, left_name, left_dim, right_name, right_dim, context=""):
        self.left_name = left_name
        self.left_dim = left_dim
        self.right_name = right_name
        self.right_dim = right_dim
        where = f" in {context}" if context else ""
        super().__init__(
            f"dimension mismatch{where}: {left_name} has dimension {left_dim}, "
            f"{right_name} has dimension {right_dim}"
        )


class ParseError(InvalidInputError):
    """Malformed JSON polytope description"""

    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        location = ""
        if line is not None:
            location = f" (line {line}, column {column})"
        prefix = f"{source}: " if source else ""
        super().__init__(f"{prefix}{message}{location}")


class UnsupportedConversionError(PolycontainError):
    """AH-polytope to H-polytope conversion needs a full-column-rank map"""


class SolverError(PolycontainError):
    """The LP solver broke down numerically"""

    def __init__(self, message, diagnostic=None):
        self.diagnostic = diagnostic or {}
        super().__init__(message)


class ResourceLimitError(PolycontainError):
    """A hard cap (nodes, pivots, enumerated vertices) was exceeded"""


class InitializationError(PolycontainError):
    """An alternation scheme could not find a feasible starting point"""


class InvalidCenterError(InvalidInputError):
    """The requested center is not strictly inside the projected set"""


class UnboundedSetError(PolycontainError):
    """A support function is unbounded, so the set is not a polytope"""
