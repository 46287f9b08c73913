"""Binary PGM (P5) reading and writing for 8-bit grayscale crops."""

from __future__ import annotations

import os

import numpy as np

from .errors import IoFailure


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    """Read a binary PGM; returns intensities scaled to [0, 1] as float64."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4 and pos < len(data):
        ch = data[pos : pos + 1]
        if ch == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    if len(tokens) < 4 or tokens[0] != b"P5":
        raise IoFailure(f"{path}: not a binary (P5) PGM")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise IoFailure(f"{path}: malformed PGM header") from None
    if not 0 < maxval < 256:
        raise IoFailure(f"{path}: only single-byte maxval supported, got {maxval}")

    pixels = data[pos + 1 : pos + 1 + width * height]
    if len(pixels) != width * height:
        raise IoFailure(f"{path}: truncated pixel data")
    gray = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)
    return gray.astype(np.float64) / maxval


def write_pgm(path: str | os.PathLike, image: np.ndarray) -> None:
    """Write a [0, 1] float image as a binary PGM with maxval 255."""
    if image.ndim != 2:
        raise IoFailure(f"PGM needs a 2-d image, got shape {image.shape}")
    levels = np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)
    header = f"P5\n{image.shape[1]} {image.shape[0]}\n255\n".encode("ascii")
    tmp = f"{os.fspath(path)}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(header + levels.tobytes())
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise IoFailure(f"cannot write {path}: {exc}") from exc
