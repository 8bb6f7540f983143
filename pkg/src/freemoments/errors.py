"""Exception hierarchy shared by all modules."""


class MomentError(Exception):
    """Base class for library errors."""


class InvalidInputError(MomentError, ValueError):
    """Non-finite or otherwise malformed numeric input."""


class DegenerateTopMomentError(MomentError):
    """The top moment y_n vanishes, so t0 and the invariants are undefined."""


class DegenerateEnsembleError(MomentError, ValueError):
    """Fewer than two particles, or unequal masses."""


class ResolutionError(MomentError):
    """Grid spacing too coarse: momentum-space tail carries too much weight."""


class ConvergenceError(MomentError):
    """A moment integral has not converged (spatial tail too heavy)."""


class BoundaryOverflowError(MomentError):
    """An evolved packet has reached the edge of its grid."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t
