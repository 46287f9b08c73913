"""Model file format and crop-dataset loading.

Model files are versioned binary: magic ``BLNK1``, a little-endian uint32
header length, the header as canonical JSON (sorted keys, no whitespace),
then every parameter's raw float64 bytes, little-endian, in the declared
order given by the config. Serialization round-trips bit-exactly.
"""

from __future__ import annotations

import json
import os
import struct

import numpy as np

from ..core import CROP_SIZE, EyeState
from ..errors import IoFailure
from .network import CnnConfig, CnnModel, TrainingMeta

MAGIC = b"BLNK1"


def serialize_model(model: CnnModel) -> bytes:
    header = json.dumps(
        {"config": model.config.to_dict(), "training_meta": model.training_meta.to_dict()},
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<I", len(header))
    blob += header
    for name in model.config.parameter_shapes():
        blob += np.ascontiguousarray(model.parameters[name], dtype="<f8").tobytes()
    return bytes(blob)


def save_model(model: CnnModel, path: str | os.PathLike) -> None:
    tmp = f"{os.fspath(path)}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(serialize_model(model))
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def deserialize_model(blob: bytes, path: str = "<bytes>") -> CnnModel:
    if blob[: len(MAGIC)] != MAGIC:
        raise IoFailure(f"{path}: bad magic, not a model file")
    offset = len(MAGIC)
    if len(blob) < offset + 4:
        raise IoFailure(f"{path}: truncated header length")
    (header_len,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    header_bytes = blob[offset : offset + header_len]
    if len(header_bytes) != header_len:
        raise IoFailure(f"{path}: truncated header")
    offset += header_len
    try:
        header = json.loads(header_bytes.decode("utf-8"))
        config = CnnConfig.from_dict(header["config"])
        meta = TrainingMeta.from_dict(header["training_meta"])
    except (ValueError, KeyError, TypeError) as exc:
        raise IoFailure(f"{path}: malformed header: {exc}") from exc

    params: dict[str, np.ndarray] = {}
    for name, shape in config.parameter_shapes().items():
        count = int(np.prod(shape))
        raw = blob[offset : offset + 8 * count]
        if len(raw) != 8 * count:
            raise IoFailure(f"{path}: truncated parameter data at {name}")
        params[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        offset += 8 * count
    if offset != len(blob):
        raise IoFailure(f"{path}: {len(blob) - offset} trailing bytes")
    return CnnModel(config=config, parameters=params, training_meta=meta)


def load_model(path: str | os.PathLike) -> CnnModel:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return deserialize_model(blob, path=os.fspath(path))


def load_crop_dataset(root: str | os.PathLike) -> list[tuple[np.ndarray, EyeState]]:
    """Load labeled crops from ``<root>/{open,closed}/*.pgm``, sorted by name."""
    from ..pgm import read_pgm

    root = os.fspath(root)
    found_any = False
    pairs: list[tuple[np.ndarray, EyeState]] = []
    for sub, state in (("open", EyeState.OPEN), ("closed", EyeState.CLOSED)):
        directory = os.path.join(root, sub)
        if not os.path.isdir(directory):
            continue
        found_any = True
        for name in sorted(os.listdir(directory)):
            if not name.endswith(".pgm"):
                continue
            crop = read_pgm(os.path.join(directory, name))
            if crop.shape != (CROP_SIZE, CROP_SIZE):
                raise IoFailure(
                    f"{directory}/{name}: expected {CROP_SIZE}x{CROP_SIZE}, got {crop.shape}"
                )
            pairs.append((crop, state))
    if not found_any:
        raise IoFailure(f"{root}: no open/ or closed/ subdirectory")
    return pairs
