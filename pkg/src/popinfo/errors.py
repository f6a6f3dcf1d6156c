"""Exception types raised by popinfo."""


class PopinfoError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(PopinfoError, ValueError):
    """Invalid model, stimulus, prior or experiment configuration."""


class SingularityError(PopinfoError, ValueError):
    """A curvature matrix or Fisher information is singular where it must not be."""


class InstanceTooLargeError(PopinfoError, ValueError):
    """An exact enumeration was refused because the response space is too large."""


class UndefinedRelativeError(PopinfoError, ZeroDivisionError):
    """A relative error was requested against a zero reference value."""
