"""Exception types shared across the package."""


class BilinredError(Exception):
    """Base class for all errors raised by this package."""


class AlphabetError(BilinredError, ValueError):
    """A word or automaton uses a symbol outside the alphabet {0, ..., m}."""


class DimensionError(BilinredError, ValueError):
    pass


class PreconditionError(BilinredError, ValueError):
    pass


class CapacityError(BilinredError):
    """A state cap or word budget was exceeded."""

    def __init__(self, message, cap):
        super().__init__(message)
        self.cap = cap


class ConvergenceError(BilinredError):
    pass


class ExpressionError(BilinredError, ValueError):
    """Syntax or evaluation error in a signal expression."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DivergenceError(BilinredError):
    """The integrated state left the finite range.

    ``time`` is the first grid time with a bad state and ``trajectory`` holds
    everything computed before it.
    """

    def __init__(self, time, trajectory=None):
        super().__init__(f"state diverged at t={time:.6g}")
        self.time = time
        self.trajectory = trajectory
