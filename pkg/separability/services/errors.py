class SeparabilityError(Exception):
    """Base class for every error raised by the separability services."""

    def __init__(self, message: str, *, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


# Matrix and state validation

class NotSquare(SeparabilityError):
    pass


class DimMismatch(SeparabilityError):
    pass


class NotHermitian(SeparabilityError):
    pass


class TraceNotOne(SeparabilityError):
    pass


class NotPositive(SeparabilityError):
    pass


class NotFinite(SeparabilityError):
    pass


class NotNormalized(SeparabilityError):
    pass


class ShapeMismatch(SeparabilityError):
    pass


class BadSubsystemIndex(SeparabilityError):
    pass


class BadPermutation(SeparabilityError):
    pass


class ConvergenceFailure(SeparabilityError):
    def __init__(self, message: str, *, max_iter: int | None = None, residual: float | None = None):
        super().__init__(message, residual=residual)
        self.max_iter = max_iter


# Criteria and measures

class NotBipartite(SeparabilityError):
    pass


class UnequalLocalDims(SeparabilityError):
    pass


class BadParams(SeparabilityError):
    pass


class BadFamily(SeparabilityError):
    pass


class NoSignChange(SeparabilityError):
    pass


class TolTooSmall(SeparabilityError):
    pass


# States and inputs

class UnknownState(SeparabilityError):
    pass


class ParamOutOfRange(SeparabilityError):
    pass


class BadRank(SeparabilityError):
    pass


class BadConfig(SeparabilityError):
    pass


class ParseError(SeparabilityError):
    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column
