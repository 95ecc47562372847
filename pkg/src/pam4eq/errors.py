"""Exception and warning types shared across the package."""


class Pam4EqError(Exception):
    """Base class for all package-specific errors."""


class InvalidSeed(Pam4EqError):
    """LFSR seed is zero (the all-zero state is absorbing)."""


class OddBitCount(Pam4EqError):
    """Bit sequence cannot be paired into PAM4 symbols."""


class InvalidRolloff(Pam4EqError):
    """Pulse-shaping roll-off outside (0, 1]."""


class EmptyFilter(Pam4EqError):
    """Filter tap sequence is empty."""


class InvalidBandwidth(Pam4EqError):
    """Channel 3 dB bandwidth outside the representable range."""


class InvalidTimingOffset(Pam4EqError):
    """Sampling phase offset outside [0, sps)."""


class AlignmentError(Pam4EqError):
    """Sequences that must be index-aligned have different lengths."""


class TooShort(Pam4EqError):
    """Sequence shorter than the window/training length it must support."""


class DegenerateTrainingSet(Pam4EqError):
    """Training data does not contain every PAM4 level."""


class DimensionError(Pam4EqError):
    """Feature vector dimension does not match the model."""


class ParseError(Pam4EqError):
    """Scenario config file is not well-formed."""


class ValidationError(Pam4EqError):
    """Scenario config failed schema validation.

    ``field`` names the offending key with its full dotted path.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class NonconvergenceWarning(UserWarning):
    """Adaptive training ended with a higher error than it started."""


class LowConfidenceWarning(UserWarning):
    """A BER estimate rests on fewer than 10 counted errors."""


class ModelQualityWarning(UserWarning):
    """Trained ordinal decision boundaries are not monotone."""
