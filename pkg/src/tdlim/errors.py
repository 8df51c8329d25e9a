"""Exception types shared across the package."""


class DimensionError(ValueError):
    """An array argument has the wrong shape for the given game."""


class ParameterError(ValueError):
    """A learner or run parameter is outside its legal range."""


class GameFormatError(ValueError):
    """A game definition violates a structural invariant."""


class NonErgodicError(RuntimeError):
    """The effective Markov chain has no unique stationary distribution."""


class BoundaryError(ValueError):
    """A behavior probability sits on (or numerically at) the simplex boundary
    where the requested learner is undefined.

    Attributes:
        indices: offending (agent, state, action) triple.
        step: trajectory step at which the boundary was hit, when applicable.
    """

    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = indices
        self.step = None


class NumericError(ArithmeticError):
    """A non-finite value appeared where the math requires finite input."""


class PartialSpectrumError(RuntimeError):
    """A Lyapunov run left the Jacobian's domain before finishing.

    Attributes:
        steps_completed: QR iterations finished before the failure.
    """

    def __init__(self, message, steps_completed=0):
        super().__init__(message)
        self.steps_completed = steps_completed
