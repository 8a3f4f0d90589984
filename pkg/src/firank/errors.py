"""Exception hierarchy.

Every failure the toolkit reports on purpose derives from :class:`FIRError`,
so callers (and the CLI) can separate typed errors from programming bugs.
"""


class FIRError(Exception):
    """Base class for all typed errors."""


class InvalidValue(FIRError, ValueError):
    pass


class InvalidLabel(FIRError, ValueError):
    pass


class EmptyInput(FIRError, ValueError):
    pass


class ShapeError(FIRError, ValueError):
    pass


class DegenerateDistribution(FIRError, ValueError):
    pass


class InvalidMask(FIRError, ValueError):
    pass


class EmptyGlcm(FIRError, ValueError):
    pass


class InsufficientClass(FIRError, ValueError):
    pass


class InsufficientSamples(FIRError, ValueError):
    pass


class InvalidGrid(FIRError, ValueError):
    pass


class ConvergenceFailure(FIRError, RuntimeError):
    pass


class UnknownMethod(FIRError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class InvalidBound(FIRError, ValueError):
    pass


class InvalidIndex(FIRError, ValueError):
    pass


class TooManyFeatures(FIRError, ValueError):
    pass


class EvaluationFailure(FIRError, RuntimeError):
    pass


class ParseError(FIRError, ValueError):
    pass


class NoInput(FIRError, ValueError):
    pass
