"""Exception hierarchy shared by all modules."""


class TreeSquareError(Exception):
    """Base class for every error raised by this package."""


class TreeError(TreeSquareError, ValueError):
    pass


class CycleDetected(TreeError):
    pass


class Disconnected(TreeError):
    pass


class DuplicateEdge(TreeError):
    pass


class SelfLoop(TreeError):
    pass


class TooSmall(TreeError):
    pass


class InvalidParams(TreeSquareError, ValueError):
    pass


class ParseError(TreeSquareError, ValueError):
    pass


class InvalidDelta(TreeSquareError, ValueError):
    pass


class OffsetExhausted(TreeSquareError, RuntimeError):
    """No free offset left in the window. Indicates a bug, never bad input."""


class SpanBoundViolated(TreeSquareError, RuntimeError):
    pass


class OutOfRange(TreeSquareError, IndexError):
    pass


class TooLarge(TreeSquareError):
    pass


class MissingColour(TreeSquareError, KeyError):
    pass
