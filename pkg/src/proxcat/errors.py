"""Exception hierarchy shared by every module."""


class ProxcatError(Exception):
    """Base class for all library errors."""


class InvalidInput(ProxcatError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(InvalidInput):
    """A point lies outside its space (e.g. a half-plane point with y <= 0)."""


class NumericFailure(ProxcatError, ArithmeticError):
    """An iterative routine failed to reach its certified accuracy."""


class UnsupportedSet(InvalidInput):
    """A set descriptor is Unknown or Empty where a concrete set is needed."""


class InsufficientSchedule(InvalidInput):
    """An explicit step schedule is too short to reach a requested partial sum."""

    def __init__(self, message, max_reachable):
        super().__init__(message)
        self.max_reachable = max_reachable
