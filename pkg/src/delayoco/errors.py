"""Exception hierarchy shared by every module of the package."""


class DelayOCOError(Exception):
    """Base class for all errors raised by delayoco."""


class InvalidInputError(DelayOCOError, ValueError):
    """Non-finite or malformed numeric input."""


class ParameterError(DelayOCOError, ValueError):
    """A configuration or algorithm parameter is out of its valid range."""


class ScheduleError(DelayOCOError, ValueError):
    """A delay schedule is malformed (e.g. a delay below 1)."""


class ProtocolError(DelayOCOError, RuntimeError):
    """The feedback protocol was violated (out-of-order delivery, missing stamps, ...)."""


class FeedbackError(DelayOCOError, ValueError):
    """A feedback payload has the wrong shape for the learner consuming it."""


class DomainError(DelayOCOError, ValueError):
    """A query point falls outside the feasible set."""


class StateCorruptionError(DelayOCOError, RuntimeError):
    """A learner's iterate left the set it is supposed to live in."""


class NumericalError(DelayOCOError, ArithmeticError):
    """An iterative routine diverged or produced non-finite values."""
