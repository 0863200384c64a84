"""Exception hierarchy shared by every module of the package."""


class KummerForgeError(Exception):
    """Base class for all errors raised by kummer_forge."""


class DomainError(KummerForgeError, ValueError):
    """An argument lies outside the domain of the operation."""


class MomentDomainError(DomainError):
    """A requested moment (or tilt) does not exist for the given law."""


class ConstraintError(DomainError):
    """Parameter constants violate an inequality required by a recovery map."""


class SampleSizeError(DomainError):
    """Too few observations for the requested statistical procedure."""


class ShapeError(DomainError):
    """Paired inputs have mismatched lengths."""


class BinningError(DomainError):
    """Quantile bins are underfilled."""


class QuadratureError(KummerForgeError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes
    ----------
    interval : tuple of float
        The interval (or worst sub-interval) where convergence failed.
    achieved : float
        Error estimate reached before giving up.
    """

    def __init__(self, message, interval=None, achieved=None):
        super().__init__(message)
        self.interval = interval
        self.achieved = achieved


class SeriesTruncationError(KummerForgeError, ArithmeticError):
    """A truncated series could not be bounded below the requested tolerance."""


class SamplerDegenerateError(KummerForgeError, RuntimeError):
    """A rejection sampler's acceptance rate collapsed."""

    def __init__(self, message, accepted=0, trials=0):
        super().__init__(message)
        self.accepted = accepted
        self.trials = trials
