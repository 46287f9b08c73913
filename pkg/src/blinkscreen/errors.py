"""Exception hierarchy shared across the package.

Every error raised on a user-facing path derives from BlinkScreenError so the
CLI can map them to a single-line diagnostic and exit code 2.
"""


class BlinkScreenError(Exception):
    """Base class for all package errors."""


class ValidationFailure(BlinkScreenError):
    """An input or record violates a documented invariant."""


class MalformedRecord(ValidationFailure):
    """A file row could not be parsed into the expected fields."""


class EmptySequence(ValidationFailure):
    """An eye-state stream contains no frames."""


class NonMonotoneFrames(ValidationFailure):
    """Frame indices are duplicated or decreasing."""


class IoFailure(BlinkScreenError):
    """A file could not be read or written."""


class InvalidFps(ValidationFailure):
    """Frames-per-second must be positive."""


class NoBlinksObserved(BlinkScreenError):
    """Neither eye ever closes, so the video carries no usable evidence."""


class OutOfRange(ValidationFailure):
    """A numeric argument falls outside its documented range."""


class ShapeMismatch(ValidationFailure):
    """Array shapes are inconsistent with the operation's contract."""


class InputTooSmall(ValidationFailure):
    """Spatial dimensions are too small for the requested window."""


class EmptyClass(ValidationFailure):
    """A training set is missing one of the two classes."""


class DivergedLoss(BlinkScreenError):
    """Training produced a non-finite loss."""


class TooFewItems(ValidationFailure):
    """Not enough items to perform the requested split."""


class EmptyMatrix(ValidationFailure):
    """A confusion matrix with no counted samples."""


class InvalidDuration(ValidationFailure):
    """Requested clip duration yields no frames."""


class InvalidRange(ValidationFailure):
    """A generator parameter range is empty or out of bounds."""


class OracleInapplicable(BlinkScreenError):
    """The closed-form count only exists for zero-jitter, zero-wink specs."""
