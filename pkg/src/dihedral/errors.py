"""Exception hierarchy shared by all modules."""


class DihedralError(Exception):
    """Base class for every error raised by this package."""


class SpecError(DihedralError, ValueError):
    """A system specification violates its invariants."""


class BadDimension(SpecError):
    pass


class NonPositiveParameter(SpecError):
    pass


class NTooSmall(SpecError):
    pass


class WrongN(DihedralError, ValueError):
    pass


class ZeroEnergy(DihedralError):
    """There is no internal motion to analyse."""


class NotCommensurate(DihedralError):
    pass


class Infeasible(DihedralError):
    pass


class NonFinite(DihedralError, ArithmeticError):
    pass


class Diverged(NonFinite):
    pass


class BadIndex(DihedralError, IndexError):
    pass


class DegenerateDiameter(DihedralError):
    pass


class CellCap(DihedralError):
    pass


class ScenarioParseError(DihedralError):
    """A scenario or request file could not be parsed.

    ``line`` and ``column`` are 1-based and may be ``None`` when the
    problem is structural rather than syntactic.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)
