"""
Little-endian binary format for sketches.

    magic      4 bytes  b"SKSM"
    version    u16      1
    alpha      f64
    k          u32
    seed       u64
    updates    u64
    x_1..x_k   f64 each
"""
from pathlib import Path
from typing import Union
import struct

import numpy as np

from ..core.schema.result import Failure, SketchFormatError
from .sketch import SkewedSketch

MAGIC = b"SKSM"
VERSION = 1
HEADER = struct.Struct("<4sHdIQQ")
ACCUMULATOR = np.dtype("<f8")


def dumps(sketch: SkewedSketch) -> bytes:
    """Encodes the sketch; compensation is folded into the accumulators"""
    header = HEADER.pack(
        MAGIC, VERSION, sketch.alpha, sketch.k, sketch.seed, sketch.update_count
    )
    return header + sketch.values.astype(ACCUMULATOR).tobytes()


def loads(data: bytes) -> SkewedSketch:
    """Decodes bytes written by `dumps`"""
    if len(data) < HEADER.size:
        raise SketchFormatError(f"sketch is {len(data)} bytes, shorter than its header")
    magic, version, alpha, k, seed, update_count = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SketchFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SketchFormatError(f"unsupported sketch format version {version}")
    expected = HEADER.size + k * ACCUMULATOR.itemsize
    if len(data) != expected:
        raise SketchFormatError(f"sketch with k={k} needs {expected} bytes, got {len(data)}")
    accumulators = np.frombuffer(data, dtype=ACCUMULATOR, count=k, offset=HEADER.size)
    try:
        return SkewedSketch(
            alpha, k, seed, accumulators=accumulators.astype(np.float64), update_count=update_count
        )
    except Failure as error:
        raise SketchFormatError(f"invalid sketch header: {error.message}") from error


def dump(sketch: SkewedSketch, path: Union[str, Path]) -> None:
    Path(path).write_bytes(dumps(sketch))


def load(path: Union[str, Path]) -> SkewedSketch:
    return loads(Path(path).read_bytes())
