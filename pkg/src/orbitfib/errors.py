"""Exception hierarchy shared by every orbitfib module."""


class OrbitfibError(Exception):
    """Base class for all library errors."""


class InputError(OrbitfibError, ValueError):
    """Malformed or out-of-range input (bad dimensions, non-regular H, ...)."""


class DimensionError(InputError):
    pass


class SingularPointError(OrbitfibError):
    """Raised when an operation needs a regular point of f_H but got a singular one."""


class NotTangentError(OrbitfibError):
    pass


class GeneralPositionError(OrbitfibError):
    pass


class SegmentTooCloseError(InputError):
    """A transport segment passes within the safety margin of a critical value."""

    def __init__(self, message, critical_value):
        super().__init__(message)
        self.critical_value = critical_value


class FlowAborted(OrbitfibError):
    """Integration stopped early; carries the partial trajectory for inspection.

    ``reason`` is one of ``"epsilon"`` (left the safe region around the
    singularities), ``"f_drift"``, ``"charpoly_drift"`` or ``"singular"``.
    """

    def __init__(self, message, reason, trajectory):
        super().__init__(message)
        self.reason = reason
        self.trajectory = trajectory
