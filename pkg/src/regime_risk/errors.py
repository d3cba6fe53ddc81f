"""Exception types raised by the regime_risk package.

Everything derives from :class:`RiskModelError`, which is itself a
``ValueError``, so callers can catch broadly or precisely.
"""


class RiskModelError(ValueError):
    """Base class for all regime_risk errors."""


class DimensionError(RiskModelError):
    """A matrix or vector has the wrong shape."""


class NotAGenerator(RiskModelError):
    """A matrix fails the rate-matrix conditions (column sums zero, signs)."""


class NotStochastic(RiskModelError):
    """A transition matrix row does not sum to one or has entries outside [0, 1]."""


class BadDistribution(RiskModelError):
    """A probability vector has negative mass or does not sum to one."""


class TimeOrder(RiskModelError):
    """Time arguments are inconsistent (e.g. t < s, or horizon/maturity mismatch)."""


class NotMeanReverting(RiskModelError):
    """Calibration cannot identify a positive reversion rate from the data."""


class TooFewPoints(RiskModelError):
    """A price series is too short to calibrate."""


class StateOutOfRange(RiskModelError):
    """A regime index is outside [0, n_states)."""


class LengthMismatch(RiskModelError):
    """Paired series have inconsistent lengths."""


class EmptySamples(RiskModelError):
    """An estimator was given no samples."""


class NonPositiveGamma(RiskModelError):
    """The entropic parameter must be strictly positive."""


class NotSupported(RiskModelError):
    """A modelling feature is deliberately not implemented (e.g. storage cost)."""


class ConfigError(RiskModelError):
    """A run configuration file is missing fields or inconsistent."""
