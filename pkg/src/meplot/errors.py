"""Exception types raised across the package."""


class MeplotError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(MeplotError, ValueError):
    """A distribution or policy parameter is out of its admissible range."""


class SupportError(MeplotError, ValueError):
    """An evaluation point lies outside the support of the distribution."""


class MeanNotDefinedError(MeplotError, ValueError):
    """The mean (and hence the mean-excess function) does not exist."""


class NoExceedanceError(MeplotError, ValueError):
    """No sample value strictly exceeds the requested threshold."""


class DegenerateSampleError(MeplotError, ValueError):
    """All sample values are identical; no mean-excess plot exists."""


class ScalingError(MeplotError, ValueError):
    """A set-scaling normalizer is zero or negative."""


class WindowError(MeplotError, ValueError):
    """A clipped set is empty inside the truncation window."""


class RegimeMismatchError(MeplotError, ValueError):
    """A shape parameter is outside the admissible range for a regime."""


class EndpointError(MeplotError, ValueError):
    """A hypothesized right endpoint is below the sample maximum."""


class NonpositiveThresholdError(MeplotError, ValueError):
    """The threshold order statistic is not positive."""


class AuxiliaryError(MeplotError, ValueError):
    """The auxiliary normalizing function is nonpositive."""


class QuadratureError(MeplotError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved_tolerance=None):
        super().__init__(message)
        self.achieved_tolerance = achieved_tolerance


class MomentConditionError(MeplotError, ArithmeticError):
    """An integral required by a moment condition appears to diverge."""


class ConfigError(MeplotError, ValueError):
    """An experiment configuration is invalid; names the offending key."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
