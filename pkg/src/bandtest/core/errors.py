"""Exception hierarchy shared by every bandtest module."""

from typing import Any, Optional

EMPTY_INPUT_ERROR = "Input sample is empty"
NON_FINITE_ERROR = "Input sample contains non-finite values"
DUPLICATE_SAMPLE_ERROR = "Sample contains duplicate value {} (tie policy 'error')"
INFEASIBLE_BAND_ERROR = "Band is infeasible for this sample: {}"
MAX_ITERATIONS_ERROR = "Solver did not converge within {} Newton iterations"
NON_MONOTONE_CDF_ERROR = "Null CDF decreases between consecutive sample points (weight {:.3g})"
INFEASIBLE_MOMENT_ERROR = "Moment target {} lies outside the convex hull [{}, {}] of the moment values"
ZERO_VARIANCE_ERROR = "Sample variance is zero"
TOO_FEW_SAMPLES_ERROR = "Need at least {} samples for two groups of size {}, got {}"


class BandTestError(Exception):
    """Base class for all errors raised by bandtest."""


class EmptyInputError(BandTestError, ValueError):
    """Raised when an operation receives an empty sample."""


class DuplicateSampleError(BandTestError, ValueError):
    """Raised when a sample contains exact ties under the `error` tie policy."""


class InvalidStepCdfError(BandTestError, ValueError):
    """Raised when knots or levels violate the step CDF invariants."""


class InvalidBandError(BandTestError, ValueError):
    """Raised when the lower edge of a band exceeds the upper edge."""


class InvalidWeightsError(BandTestError, ValueError):
    """Raised when a weight vector is negative or does not hit its sum target."""


class InfeasibleBandError(BandTestError):
    """Raised when no CDF in the band is compatible with the sample."""


class MaxIterationsExceededError(BandTestError):
    """Raised when the barrier solver hits its iteration cap."""

    def __init__(self, message: str, best: Optional[Any] = None):
        """
        Initialize the error.

        Args:
            message: Human readable description
            best: Best iterate reached before giving up (an ElrdfResult)
        """
        super().__init__(message)
        self.best = best


class NonMonotoneCdfError(BandTestError, ValueError):
    """Raised when a null CDF produces a negative spacing."""


class InfeasibleMomentError(BandTestError):
    """Raised when a moment target is outside the convex hull of the moment values."""


class ZeroVarianceError(BandTestError, ValueError):
    """Raised when a normality statistic is requested for a constant sample."""


class TooFewSamplesError(BandTestError, ValueError):
    """Raised when a band cannot be built from fewer than two groups."""


class ConfigParseError(BandTestError, ValueError):
    """Raised when a configuration line cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        """
        Initialize the error.

        Args:
            message: Description of the problem
            line: 1-based line number, if known
        """
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.message = message
        self.line = line


class UnknownKeyError(ConfigParseError):
    """Raised when a configuration names a key that does not exist."""


class ConfigRangeError(ConfigParseError):
    """Raised when a configuration value is outside its allowed range."""


class InputFileError(BandTestError):
    """Raised when a sample or band file cannot be read or parsed."""
