"""Exception hierarchy shared by the library and the command-line front end."""


class RobustFLError(Exception):
    """Base class for all errors raised by :mod:`robustfl`."""

    exit_code = 1


class ValidationError(RobustFLError, ValueError):
    """Invalid arguments: non-finite entries, nonpositive parameters, bad seeds."""

    exit_code = 2


class DimensionError(ValidationError):
    """Shapes or lengths of the arguments do not fit together."""


class StructuralError(ValidationError):
    """The requested (k, T, m) combination can never be persistently exciting."""


class UncontrollableError(ValidationError):
    """(A, B) is not controllable, so no positive uniform bound on sigma(Theta_z) exists."""


class ParseError(ValidationError):
    """A CSV or JSON file does not follow the documented format."""

    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class NumericalError(RobustFLError):
    """A numerical stage failed (degenerate data, failed search)."""

    exit_code = 3


class StageError(NumericalError):
    """Failure inside one stage of an experiment pipeline."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
