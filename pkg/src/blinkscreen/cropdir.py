"""Per-video crop directories: frame PGM pairs plus a manifest.

A crop directory holds one video's eye crops as ``frame_<n>_L.pgm`` /
``frame_<n>_R.pgm`` (left crops already mirrored to right orientation) and a
``manifest.csv`` with ``# video_id=`` and ``# fps=`` comment lines, then
``frame,left_file,right_file,skipped`` rows. Frames skipped upstream (no
usable landmarks) keep a manifest row with empty file fields and skipped=1;
they are absent from the decoded stream and do not count toward the frame
total.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .core import EyeCropPair, atomic_write_text
from .errors import IoFailure, MalformedRecord, NonMonotoneFrames
from .pgm import read_pgm

MANIFEST_NAME = "manifest.csv"
MANIFEST_HEADER = "frame,left_file,right_file,skipped"


@dataclass(frozen=True)
class CropFrameRecord:
    frame_index: int
    left_file: str
    right_file: str
    skipped: bool


@dataclass(frozen=True)
class CropDirectory:
    video_id: str
    fps: float
    records: tuple[CropFrameRecord, ...]

    def __post_init__(self) -> None:
        prev = -1
        for rec in self.records:
            if rec.frame_index <= prev:
                raise NonMonotoneFrames(
                    f"manifest frame {rec.frame_index} after {prev} in {self.video_id!r}"
                )
            prev = rec.frame_index

    @property
    def usable(self) -> tuple[CropFrameRecord, ...]:
        return tuple(rec for rec in self.records if not rec.skipped)


def read_crop_manifest(directory: str | os.PathLike) -> CropDirectory:
    path = os.path.join(os.fspath(directory), MANIFEST_NAME)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    meta: dict[str, str] = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        key, _, value = lines[i][1:].strip().partition("=")
        meta[key.strip()] = value.strip()
        i += 1
    if "video_id" not in meta or "fps" not in meta:
        raise MalformedRecord(f"{path}: missing '# video_id=' or '# fps=' header")
    if i >= len(lines) or lines[i] != MANIFEST_HEADER:
        raise MalformedRecord(f"{path}: expected header {MANIFEST_HEADER!r}")
    try:
        fps = float(meta["fps"])
    except ValueError:
        raise MalformedRecord(f"{path}: fps {meta['fps']!r} is not a number") from None

    records: list[CropFrameRecord] = []
    for lineno, line in enumerate(lines[i + 1 :], i + 2):
        parts = line.split(",")
        if len(parts) != 4:
            raise MalformedRecord(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
        frame_text, left_file, right_file, skipped_text = parts
        try:
            frame_index = int(frame_text)
            skipped = bool(int(skipped_text))
        except ValueError:
            raise MalformedRecord(f"{path}:{lineno}: bad numeric field in {line!r}") from None
        if not skipped and (not left_file or not right_file):
            raise MalformedRecord(f"{path}:{lineno}: usable frame missing a crop file")
        records.append(CropFrameRecord(frame_index, left_file, right_file, skipped))
    return CropDirectory(video_id=meta["video_id"], fps=fps, records=tuple(records))


def write_crop_manifest(directory: str | os.PathLike, crops: CropDirectory) -> None:
    rows = [f"# video_id={crops.video_id}", f"# fps={crops.fps!r}", MANIFEST_HEADER]
    rows.extend(
        f"{rec.frame_index},{rec.left_file},{rec.right_file},{int(rec.skipped)}"
        for rec in crops.records
    )
    atomic_write_text(
        os.path.join(os.fspath(directory), MANIFEST_NAME), "\n".join(rows) + "\n"
    )


def load_crop_frames(
    directory: str | os.PathLike, crops: CropDirectory | None = None
) -> tuple[CropDirectory, list[EyeCropPair]]:
    """Decode every usable frame's validated crop pair.

    Left crops on disk are already mirrored to right orientation, which the
    returned pairs record.
    """
    directory = os.fspath(directory)
    crops = crops or read_crop_manifest(directory)
    frames = [
        EyeCropPair(
            video_id=crops.video_id,
            frame_index=rec.frame_index,
            left_image=read_pgm(os.path.join(directory, rec.left_file)),
            right_image=read_pgm(os.path.join(directory, rec.right_file)),
            left_is_flipped=True,
        )
        for rec in crops.usable
    ]
    return crops, frames
