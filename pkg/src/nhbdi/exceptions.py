"""Exception types raised across the package."""


class NHBDIError(Exception):
    """Base class for all package errors."""


class DomainError(NHBDIError, ValueError):
    """An argument lies outside the domain of the operation (e.g. negative time)."""


class ConfigError(NHBDIError, ValueError):
    """A scenario or run configuration is malformed or inconsistent."""


class RangeError(NHBDIError, ValueError):
    """A lookup falls outside a precomputed table; extend the table instead."""


class UndefinedReproductionError(NHBDIError, ZeroDivisionError):
    """The recovery rate vanishes, so R(t) = lambda/mu is undefined."""


class ApproximationError(NHBDIError, ValueError):
    """A closed-form approximation is used outside its regime of validity."""


class TruncationError(NHBDIError, ValueError):
    """A truncated state space is too small for the requested accuracy."""


class SimulationError(NHBDIError, RuntimeError):
    """A sample path exceeded the event budget."""
