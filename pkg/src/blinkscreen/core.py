"""Domain types and file formats shared by every stage of the pipeline.

Two on-disk formats live here:

* eye-state stream CSV: per-frame open/closed labels for one video,
  ``# video_id=<id>`` and ``# fps=<real>`` comment lines, then a
  ``frame,left,right`` header with states encoded 0 (open) / 1 (closed);
* feature table CSV: one ``video_id,ecf_left,ecf_right,frame_count,bs,label``
  row per video, label in {normal, palsy}.

All types are immutable values after construction and safe to share across
threads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptySequence,
    IoFailure,
    MalformedRecord,
    NonMonotoneFrames,
    ValidationFailure,
)

CROP_SIZE = 50


class EyeState(IntEnum):
    """State of a single eye in a single frame. Serialized as 0/1."""

    OPEN = 0
    CLOSED = 1


class SubjectLabel(Enum):
    """Video-level ground truth for the screening task."""

    NORMAL = "normal"
    PALSY = "palsy"

    @property
    def index(self) -> int:
        """Row/column index in confusion matrices (normal=0, palsy=1)."""
        return 0 if self is SubjectLabel.NORMAL else 1

    @classmethod
    def from_text(cls, text: str) -> "SubjectLabel":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise MalformedRecord(f"unknown label {text!r}, expected normal|palsy") from None


@dataclass(frozen=True)
class FrameStates:
    """Eye states of both eyes at one frame index."""

    frame_index: int
    left: EyeState
    right: EyeState


@dataclass(frozen=True)
class EyeStateSequence:
    """Per-frame (left, right) eye states for one video, in frame order.

    Frame indices must be strictly increasing; gaps are allowed (frames the
    upstream stage skipped are simply absent and do not count toward the
    frame total).
    """

    video_id: str
    fps: float
    frames: tuple[FrameStates, ...]

    def __post_init__(self) -> None:
        if not self.frames:
            raise EmptySequence(f"sequence {self.video_id!r} has no frames")
        if not (self.fps > 0):
            raise ValidationFailure(f"fps must be > 0, got {self.fps}")
        prev = -1
        for fr in self.frames:
            if fr.frame_index < 0:
                raise ValidationFailure(f"negative frame index {fr.frame_index}")
            if fr.frame_index <= prev:
                raise NonMonotoneFrames(
                    f"frame index {fr.frame_index} after {prev} in {self.video_id!r}"
                )
            prev = fr.frame_index

    @property
    def frame_count(self) -> int:
        """Total number of recorded frames."""
        return len(self.frames)

    @property
    def duration_seconds(self) -> float:
        """Video length derived from the frame total (not stored separately)."""
        return self.frame_count / self.fps


@dataclass(frozen=True, eq=False)
class EyeCropPair:
    """One frame's two 50x50 grayscale eye crops, intensities in [0, 1].

    The left crop must already be mirrored to right-eye orientation before it
    reaches the frame classifier; ``left_is_flipped`` records that.
    """

    video_id: str
    frame_index: int
    left_image: np.ndarray
    right_image: np.ndarray
    left_is_flipped: bool

    def __post_init__(self) -> None:
        for name, img in (("left_image", self.left_image), ("right_image", self.right_image)):
            if img.shape != (CROP_SIZE, CROP_SIZE):
                raise ValidationFailure(f"{name} must be {CROP_SIZE}x{CROP_SIZE}, got {img.shape}")
            if img.min() < 0.0 or img.max() > 1.0:
                raise ValidationFailure(f"{name} intensities must lie in [0, 1]")


@dataclass(frozen=True)
class BlinkFeature:
    """Per-video closed-frame counts and their min/max similarity ratio."""

    video_id: str
    ecf_left: int
    ecf_right: int
    frame_count: int
    bs: float

    def __post_init__(self) -> None:
        if self.frame_count <= 0:
            raise ValidationFailure(f"frame_count must be > 0, got {self.frame_count}")
        for name, ecf in (("ecf_left", self.ecf_left), ("ecf_right", self.ecf_right)):
            if not 0 <= ecf <= self.frame_count:
                raise ValidationFailure(
                    f"{name}={ecf} outside [0, frame_count={self.frame_count}]"
                )
        if not 0.0 <= self.bs <= 1.0:
            raise ValidationFailure(f"bs must lie in [0, 1], got {self.bs}")
        hi = max(self.ecf_left, self.ecf_right)
        if hi > 0:
            expected = min(self.ecf_left, self.ecf_right) / hi
            if abs(self.bs - expected) > 1e-12:
                raise ValidationFailure(
                    f"bs={self.bs!r} inconsistent with counts "
                    f"({self.ecf_left}, {self.ecf_right})"
                )


@dataclass(frozen=True)
class EvalReport:
    """Accuracy plus a 2x2 confusion matrix (rows = actual, cols = predicted).

    Index 0 is the negative class (normal / open), index 1 the positive one
    (palsy / closed).
    """

    accuracy: float
    confusion: tuple[tuple[int, int], tuple[int, int]]
    n: int

    def __post_init__(self) -> None:
        cells = [c for row in self.confusion for c in row]
        if any(c < 0 for c in cells):
            raise ValidationFailure("confusion cells must be non-negative")
        if sum(cells) != self.n:
            raise ValidationFailure(
                f"confusion cells sum to {sum(cells)}, expected n={self.n}"
            )
        trace = self.confusion[0][0] + self.confusion[1][1]
        if self.n > 0 and self.accuracy != trace / self.n:
            raise ValidationFailure("accuracy must equal trace/n")

    @classmethod
    def from_confusion(
        cls, confusion: Sequence[Sequence[int]]
    ) -> "EvalReport":
        rows = tuple(tuple(int(c) for c in row) for row in confusion)
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValidationFailure("confusion matrix must be 2x2")
        n = sum(c for row in rows for c in row)
        trace = rows[0][0] + rows[1][1]
        return cls(accuracy=trace / n if n else 0.0, confusion=rows, n=n)

    def to_text(self, actual_names: tuple[str, str], predicted_names: tuple[str, str]) -> str:
        """Render as an aligned console table."""
        ((tn, fp), (fn, tp)) = self.confusion
        width = max(len(s) for s in actual_names + predicted_names + (str(max(tn, fp, fn, tp)),))
        head = f"{'':>{width + 7}}  {predicted_names[0]:>{width}}  {predicted_names[1]:>{width}}"
        row0 = f"actual {actual_names[0]:>{width}}  {tn:>{width}}  {fp:>{width}}"
        row1 = f"actual {actual_names[1]:>{width}}  {fn:>{width}}  {tp:>{width}}"
        acc = f"accuracy: {self.accuracy:.4f}  ({tn + tp}/{self.n})"
        return "\n".join([head, row0, row1, acc])

    def to_csv(self) -> str:
        """Machine-readable form: ``tn,fp,fn,tp,accuracy``."""
        ((tn, fp), (fn, tp)) = self.confusion
        return f"tn,fp,fn,tp,accuracy\n{tn},{fp},{fn},{tp},{self.accuracy!r}\n"

    @classmethod
    def from_csv(cls, text: str) -> "EvalReport":
        lines = [ln for ln in text.strip().split("\n") if ln]
        if len(lines) != 2 or lines[0] != "tn,fp,fn,tp,accuracy":
            raise MalformedRecord("expected a tn,fp,fn,tp,accuracy report")
        parts = lines[1].split(",")
        if len(parts) != 5:
            raise MalformedRecord(f"expected 5 fields, got {len(parts)}")
        try:
            tn, fp, fn, tp = (int(p) for p in parts[:4])
            accuracy = float(parts[4])
        except ValueError:
            raise MalformedRecord(f"bad numeric field in {lines[1]!r}") from None
        return cls(accuracy=accuracy, confusion=((tn, fp), (fn, tp)), n=tn + fp + fn + tp)


def _parse_header_comments(lines: list[str]) -> tuple[dict[str, str], int]:
    meta: dict[str, str] = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        body = lines[i][1:].strip()
        if "=" in body:
            key, _, value = body.partition("=")
            meta[key.strip()] = value.strip()
        i += 1
    return meta, i


def read_eye_state_stream(path: str | os.PathLike) -> EyeStateSequence:
    """Read and validate one eye-state stream CSV."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    meta, start = _parse_header_comments(lines)
    if "video_id" not in meta or "fps" not in meta:
        raise MalformedRecord(f"{path}: missing '# video_id=' or '# fps=' header")
    try:
        fps = float(meta["fps"])
    except ValueError:
        raise MalformedRecord(f"{path}: fps {meta['fps']!r} is not a number") from None

    if start >= len(lines) or lines[start].strip() != "frame,left,right":
        raise MalformedRecord(f"{path}: expected 'frame,left,right' header row")

    frames: list[FrameStates] = []
    for lineno, line in enumerate(lines[start + 1 :], start + 2):
        parts = line.split(",")
        if len(parts) != 3:
            raise MalformedRecord(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
        try:
            idx, left, right = (int(p) for p in parts)
        except ValueError:
            raise MalformedRecord(f"{path}:{lineno}: non-integer field in {line!r}") from None
        if left not in (0, 1) or right not in (0, 1):
            raise MalformedRecord(f"{path}:{lineno}: eye states must be 0 or 1")
        frames.append(FrameStates(idx, EyeState(left), EyeState(right)))

    if not frames:
        raise EmptySequence(f"{path}: no frame rows")
    return EyeStateSequence(video_id=meta["video_id"], fps=fps, frames=tuple(frames))


def write_eye_state_stream(seq: EyeStateSequence, path: str | os.PathLike) -> None:
    """Write one sequence in the eye-state stream format (atomic replace)."""
    body = [f"# video_id={seq.video_id}", f"# fps={seq.fps!r}", "frame,left,right"]
    body.extend(f"{fr.frame_index},{int(fr.left)},{int(fr.right)}" for fr in seq.frames)
    atomic_write_text(path, "\n".join(body) + "\n")


FEATURE_TABLE_HEADER = "video_id,ecf_left,ecf_right,frame_count,bs,label"


def write_feature_table(
    features: Iterable[tuple[BlinkFeature, SubjectLabel]], path: str | os.PathLike
) -> None:
    """Write labeled blink features; round-trip reads back identical values."""
    rows = [FEATURE_TABLE_HEADER]
    for feature, label in features:
        rows.append(
            f"{feature.video_id},{feature.ecf_left},{feature.ecf_right},"
            f"{feature.frame_count},{feature.bs!r},{label.value}"
        )
    atomic_write_text(path, "\n".join(rows) + "\n")


def read_feature_table(path: str | os.PathLike) -> list[tuple[BlinkFeature, SubjectLabel]]:
    """Read a feature table CSV, validating every record."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if not lines or lines[0] != FEATURE_TABLE_HEADER:
        raise MalformedRecord(f"{path}: expected header {FEATURE_TABLE_HEADER!r}")

    out: list[tuple[BlinkFeature, SubjectLabel]] = []
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != 6:
            raise MalformedRecord(f"{path}:{lineno}: expected 6 fields, got {len(parts)}")
        vid, ecf_l, ecf_r, count, bs, label = parts
        try:
            feature = BlinkFeature(
                video_id=vid,
                ecf_left=int(ecf_l),
                ecf_right=int(ecf_r),
                frame_count=int(count),
                bs=float(bs),
            )
        except ValueError:
            raise MalformedRecord(f"{path}:{lineno}: bad numeric field in {line!r}") from None
        out.append((feature, SubjectLabel.from_text(label)))
    return out


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write via a sibling temp file + rename so readers never see partials."""
    path = os.fspath(path)
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise IoFailure(f"cannot write {path}: {exc}") from exc
