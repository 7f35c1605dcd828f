"""Exception types raised across the package."""


class ValidmapError(Exception):
    """Base class for all package errors."""


class DomainError(ValidmapError):
    """A coordinate lies outside the validation domain."""


class ParameterError(ValidmapError):
    """An argument violates a documented precondition."""


class EvaluationError(ValidmapError):
    """A model or truth function returned a non-finite value."""


class IllConditionedError(ValidmapError):
    """A covariance matrix could not be factorized even with maximal jitter."""


class ConsistencyError(ValidmapError):
    """Two objects that must share state (e.g. training inputs) disagree."""


class CoverageInfeasibleError(ValidmapError):
    """The requested conformal coverage level is unattainable at this sample size."""


class ConfigError(ValidmapError):
    """A run configuration file is malformed; message carries file and line."""
