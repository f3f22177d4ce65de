"""
Keyed counter-based uniforms.

A Philox bit generator keyed by (index, seed) yields a fixed sequence of
64-bit lanes, so the draws for one key never depend on any other key or on
the order keys are visited in.
"""
from typing import Tuple

import numpy as np

from ..core.interfaces.base import SEED
from ..core.schema.schema import field as read_field, integer

KEY_INDEX = integer().within(0, 2**64 - 1)

_MANTISSA_SHIFT = np.uint64(11)
_TWO_POW_MINUS_53 = 2.0**-53


def philox(seed: int, index: int) -> np.random.Philox:
    """Philox4x64 keyed by the 128-bit value (index << 64) | seed"""
    seed = read_field("seed", SEED, seed)
    index = read_field("index", KEY_INDEX, index)
    return np.random.Philox(key=(index << 64) | seed)


def raw_lanes(seed: int, index: int, count: int) -> np.ndarray:
    """The first `count` 64-bit outputs for the key"""
    return philox(seed, index).random_raw(count)


def open_unit(raw: np.ndarray) -> np.ndarray:
    """Top 53 bits mapped to a midpoint grid strictly inside (0, 1)"""
    return ((raw >> _MANTISSA_SHIFT).astype(np.float64) + 0.5) * _TWO_POW_MINUS_53


def keyed_uniforms(seed: int, index: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    n pairs (u, w): u uniform on (-pi/2, pi/2) and w unit exponential.

    Pair j (0-based) uses lanes 2j and 2j + 1.
    """
    unit = open_unit(raw_lanes(seed, index, 2 * n))
    u = np.pi * (unit[0::2] - 0.5)
    w = -np.log(unit[1::2])
    return u, w
