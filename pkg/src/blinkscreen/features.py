"""Video-level blink features from a per-frame eye-state sequence.

The pipeline counts, per eye, the frames spent closed (ECF). Because total
closed TIME for an eye is ECF scaled by the constant seconds-per-frame, the
ratio of the two eyes' closed times equals the ratio of their closed-frame
counts, independent of clip length or frame rate. The blink-similarity score
is the min/max form of that ratio: 1 for perfectly symmetric blinking,
approaching 0 as one eye stops closing.
"""

from __future__ import annotations

from .core import BlinkFeature, EyeState, EyeStateSequence, FrameStates
from .errors import InvalidFps, NoBlinksObserved, OutOfRange


def count_eye_closed_frames(seq: EyeStateSequence) -> tuple[int, int]:
    """Count frames in which each eye is closed: (left, right)."""
    left = sum(1 for fr in seq.frames if fr.left is EyeState.CLOSED)
    right = sum(1 for fr in seq.frames if fr.right is EyeState.CLOSED)
    return left, right


def estimate_ect(ecf: int, frame_count: int, fps: float) -> float:
    """Closed time in seconds: ecf scaled by seconds-per-frame.

    With clip length L = frame_count / fps this is ecf * (L / frame_count),
    which reduces to ecf / fps; the reduced form is what we compute.
    """
    if not fps > 0:
        raise InvalidFps(f"fps must be > 0, got {fps}")
    if frame_count <= 0:
        raise OutOfRange(f"frame_count must be > 0, got {frame_count}")
    if not 0 <= ecf <= frame_count:
        raise OutOfRange(f"ecf={ecf} outside [0, {frame_count}]")
    return ecf / fps


def blink_similarity(ecf_left: int, ecf_right: int) -> float:
    """min/max ratio of per-eye closed-frame counts, in [0, 1].

    Symmetric in its arguments and equal to 1 exactly when the counts match.
    Raises when both counts are zero: a clip in which neither eye ever closes
    carries no evidence either way, and silently scoring it 1.0 would pass a
    possibly-undiagnosable video as healthy.
    """
    if ecf_left < 0 or ecf_right < 0:
        raise OutOfRange(f"counts must be >= 0, got ({ecf_left}, {ecf_right})")
    if ecf_left == 0 and ecf_right == 0:
        raise NoBlinksObserved("no closed frames on either eye")
    return min(ecf_left, ecf_right) / max(ecf_left, ecf_right)


def severity_score(bs: float) -> float:
    """Distance of the similarity score from perfect symmetry: 1 - bs."""
    if not 0.0 <= bs <= 1.0:
        raise OutOfRange(f"bs must lie in [0, 1], got {bs}")
    return 1.0 - bs


def extract_feature(seq: EyeStateSequence) -> BlinkFeature:
    """Compute the per-video feature record from a validated sequence."""
    ecf_left, ecf_right = count_eye_closed_frames(seq)
    try:
        bs = blink_similarity(ecf_left, ecf_right)
    except NoBlinksObserved:
        raise NoBlinksObserved(
            f"video {seq.video_id!r}: no closed frames on either eye"
        ) from None
    return BlinkFeature(
        video_id=seq.video_id,
        ecf_left=ecf_left,
        ecf_right=ecf_right,
        frame_count=seq.frame_count,
        bs=bs,
    )


def median_filter3(seq: EyeStateSequence) -> EyeStateSequence:
    """Median-of-3 smoothing per eye, for absorbing single-frame classifier
    flicker. Opt-in plumbing; the default pipeline counts raw states.

    Endpoints keep their original state. Frame indices and metadata are
    preserved; physical gaps in the index do not matter because the filter
    operates on recorded-frame order.
    """
    states = [(int(fr.left), int(fr.right)) for fr in seq.frames]
    n = len(states)
    if n < 3:
        return seq
    smoothed: list[FrameStates] = [seq.frames[0]]
    for i in range(1, n - 1):
        left = sorted([states[i - 1][0], states[i][0], states[i + 1][0]])[1]
        right = sorted([states[i - 1][1], states[i][1], states[i + 1][1]])[1]
        smoothed.append(
            FrameStates(seq.frames[i].frame_index, EyeState(left), EyeState(right))
        )
    smoothed.append(seq.frames[-1])
    return EyeStateSequence(video_id=seq.video_id, fps=seq.fps, frames=tuple(smoothed))
