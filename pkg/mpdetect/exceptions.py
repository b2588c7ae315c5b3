"""
Custom exceptions for the mpdetect package.
"""


class MPDetectError(Exception):
    """Base exception for all mpdetect errors."""
    pass


class ConfigError(MPDetectError):
    """Raised when an experiment configuration is invalid."""
    pass


class ConstellationError(MPDetectError, ValueError):
    """Raised for unsupported constellations or malformed bit streams."""
    pass


class DenoiserError(MPDetectError, ValueError):
    """Raised when the denoiser receives invalid arguments."""
    pass


class ChannelError(MPDetectError, ValueError):
    """Raised when a channel or correlation matrix cannot be built."""
    pass


class DetectorError(MPDetectError):
    """Raised when a detector is misconfigured or fed inconsistent inputs."""
    pass


class BeliefDivergenceError(DetectorError):
    """Raised when the beliefs of an iterative detector blow up."""
    def __init__(self, message, algorithm=None, iteration=None):
        super().__init__(message)
        self.algorithm = algorithm
        self.iteration = iteration


class DiagnosticsError(MPDetectError, ValueError):
    """Raised when a diagnostic is queried with inconsistent data."""
    pass
