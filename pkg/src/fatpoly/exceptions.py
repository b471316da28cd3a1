"""Exception types raised across the package."""


class DimensionMismatch(ValueError):
    """Raised when a point and a hyperplane/polytope disagree on dimension."""


class LearningFailure(RuntimeError):
    """A learner could not produce a consistent polytope.

    Parameters
    ----------
    reason : str
        Short machine-readable tag, e.g. ``"no_progress"`` or ``"cap"``.
    """

    def __init__(self, reason, message=None):
        self.reason = reason
        super().__init__(message or reason)


class PerceptronFailure(LearningFailure):
    """The update budget ran out before every point reached the target margin."""

    def __init__(self, updates, message=None):
        self.updates = updates
        super().__init__("updates_exhausted",
                         message or f"update budget exhausted after {updates} updates")


class NetOverflowError(ValueError):
    """Requested net needs more samples than the configured hard limit."""


class ProjectionError(RuntimeError):
    """Dykstra projection failed to converge; ``best`` holds the last iterate."""

    def __init__(self, message, best=None, sweeps=0):
        self.best = best
        self.sweeps = sweeps
        super().__init__(message)


class CombinatorialBlowup(ValueError):
    """Exhaustive subset search would exceed the configured cap."""


class InfeasibleOrTimeout(RuntimeError):
    """Separator oracle gave up: the strict system is infeasible or its margin is too small."""


class DegenerateSystem(RuntimeError):
    """Equality elimination hit a pivot below tolerance."""
