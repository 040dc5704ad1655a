"""Exception hierarchy shared by all modules."""


class ImpulsivePressureError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(ImpulsivePressureError, ValueError):
    """Malformed arguments: wrong shapes, out-of-range parameters, bad configs."""


class SpacingViolationError(ImpulsivePressureError, RuntimeError):
    """An impulsive trajectory produced more jumps than the spacing guard allows."""


class DomainError(ImpulsivePressureError, ValueError):
    """A point lies outside the region an operation is defined on."""


class UnsupportedSystemError(ImpulsivePressureError, KeyError):
    """No closed-form oracle is known for the requested system."""
