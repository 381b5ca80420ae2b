"""Exception types raised across the package."""


class ReprBenchError(Exception):
    """Base class for all package errors."""


# ingest
class MissingColumn(ReprBenchError, KeyError):
    pass


class UnparsableTimestamp(ReprBenchError, ValueError):
    def __init__(self, row: int, raw):
        self.row = row
        self.raw = raw
        super().__init__(f"cannot parse timestamp {raw!r} at data row {row}")


class EmptyRange(ReprBenchError, ValueError):
    pass


class NotMonotonic(ReprBenchError, ValueError):
    pass


class GapTooLarge(ReprBenchError, ValueError):
    def __init__(self, start, length: int, limit: int):
        self.start = start
        self.length = length
        self.limit = limit
        super().__init__(
            f"gap of {length} missing hour(s) starting at {start} exceeds limit of {limit}"
        )


# calendar
class UnparsableDate(ReprBenchError, ValueError):
    def __init__(self, line: int, raw: str):
        self.line = line
        self.raw = raw
        super().__init__(f"line {line}: cannot parse date {raw!r} (expected YYYY-MM-DD)")


# transforms
class InsufficientHistory(ReprBenchError, IndexError):
    pass


class ShapeMismatch(ReprBenchError, ValueError):
    pass


class IndexOutOfBounds(ReprBenchError, IndexError):
    pass


class EmptyInput(ReprBenchError, ValueError):
    pass


class KernelTooLarge(ReprBenchError, ValueError):
    pass


class InputTooShort(ReprBenchError, ValueError):
    pass


class InvalidK(ReprBenchError, ValueError):
    pass


class InvalidComponents(ReprBenchError, ValueError):
    pass


# numerics
class NotScalarLoss(ReprBenchError, ValueError):
    pass


class MissingGradient(ReprBenchError, RuntimeError):
    pass


# models / experiment
class EmptyTrainingSet(ReprBenchError, ValueError):
    pass


class ReprMismatch(ReprBenchError, TypeError):
    pass


class NonFiniteLoss(ReprBenchError, FloatingPointError):
    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"training loss became non-finite in epoch {epoch}")


class LengthMismatch(ReprBenchError, ValueError):
    pass


class DivisionByZero(ReprBenchError, ZeroDivisionError):
    pass


class BadCheckpoint(ReprBenchError, ValueError):
    pass


class IrregularSpacing(ReprBenchError, ValueError):
    pass


class ExperimentError(ReprBenchError, RuntimeError):
    """A grid cell failed; carries the cell coordinates of the failure."""

    def __init__(self, module: str, representation: str, horizon: int, seed, cause: Exception):
        self.module = module
        self.representation = representation
        self.horizon = horizon
        self.seed = seed
        self.cause = cause
        super().__init__(
            f"{module} failed for repr={representation} horizon={horizon} seed={seed}: "
            f"{type(cause).__name__}: {cause}"
        )
