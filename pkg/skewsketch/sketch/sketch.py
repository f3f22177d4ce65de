"""
Linear Turnstile sketch built from skewed stable random projections.

Accumulator j holds sum_i A[i] r_ij with r_ij ~ S(alpha, 1, 1); the entries
are regenerated from (seed, i, j) on demand, so the projection matrix is
never stored.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Tuple, Union
import logging
import math

import numpy as np

from ..core import estimators
from ..core.interfaces.base import (
    ALPHA,
    SEED,
    EstimateReport,
    Method,
    StableParams,
    StreamUpdate,
)
from ..core.schema.result import (
    ConfigurationError,
    IncompatibleSketchError,
    InputError,
)
from ..core.schema.schema import field as read_field, integer
from ..core.stable import sample
from .prng import keyed_uniforms

logger = logging.getLogger(__name__)

SKETCH_SIZE = integer().within(2, 2**32 - 1)
# indices key the generator with 64 bits
KEYED_INDEX = integer().within(1, 2**64 - 1)
ROW_CACHE_SIZE = 4096

Update = Union[StreamUpdate, Tuple[int, float]]


def entry(seed: int, index: int, j: int, alpha: float) -> float:
    """r_ij, drawn from lanes 2(j-1) and 2(j-1)+1 of the key (seed, index)"""
    index = read_field("index", KEYED_INDEX, index)
    if j < 1:
        raise ConfigurationError(f"projection column j must be at least 1, got {j!r}")
    return float(projection_row(seed, index, j, alpha)[j - 1])


@lru_cache(maxsize=ROW_CACHE_SIZE)
def projection_row(seed: int, index: int, k: int, alpha: float) -> np.ndarray:
    """(r_i1, ..., r_ik) as a read-only array"""
    u, w = keyed_uniforms(seed, index, k)
    row = np.asarray(sample(StableParams(alpha), u, w), dtype=np.float64)
    row.flags.writeable = False
    return row


def _as_update(update: Update) -> StreamUpdate:
    if isinstance(update, StreamUpdate):
        return update
    index, increment = update
    return StreamUpdate(index, increment)


@dataclass(eq=False)
class SkewedSketch:
    """
    k accumulators plus the (alpha, k, seed) identity that fixes the projection.

    A sketch has a single writer; readers may run between writes.
    """

    alpha: float
    k: int
    seed: int
    accumulators: Optional[np.ndarray] = None
    update_count: int = 0
    compensated: bool = False
    _compensation: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.alpha = read_field("alpha", ALPHA, self.alpha)
        if self.alpha == 1.0:
            raise ConfigurationError("skewed projections exclude alpha = 1")
        self.k = read_field("k", SKETCH_SIZE, self.k)
        self.seed = read_field("seed", SEED, self.seed)
        if self.accumulators is None:
            self.accumulators = np.zeros(self.k, dtype=np.float64)
        else:
            self.accumulators = np.array(self.accumulators, dtype=np.float64)
            if self.accumulators.shape != (self.k,):
                raise ConfigurationError(
                    f"expected {self.k} accumulators, got shape {self.accumulators.shape}"
                )
        self._compensation = np.zeros(self.k, dtype=np.float64)

    @classmethod
    def empty(
        cls, alpha: float, k: int, seed: int, compensated: bool = False
    ) -> "SkewedSketch":
        return cls(alpha, k, seed, compensated=compensated)

    @property
    def identity(self) -> Tuple[float, int, int]:
        return (self.alpha, self.k, self.seed)

    @property
    def values(self) -> np.ndarray:
        """The accumulators x_j, compensation folded in"""
        if self.compensated:
            return self.accumulators + self._compensation
        return self.accumulators.copy()

    def update(self, update: Update) -> "SkewedSketch":
        """x_j += I_t r_ij for every j"""
        update = _as_update(update)
        index = read_field("index", KEYED_INDEX, update.index)
        increment = update.increment
        if not math.isfinite(increment):
            raise InputError(f"increment for index {index} is not finite: {increment!r}")
        self.update_count += 1
        if increment == 0.0:
            return self
        delta = increment * projection_row(self.seed, index, self.k, self.alpha)
        if self.compensated:
            self._add_compensated(delta)
        else:
            self.accumulators += delta
        return self

    def _add_compensated(self, delta: np.ndarray) -> None:
        # Neumaier summation, element-wise
        s = self.accumulators
        t = s + delta
        self._compensation += np.where(
            np.abs(s) >= np.abs(delta), (s - t) + delta, (delta - t) + s
        )
        self.accumulators = t

    def update_many(self, updates: Iterable[Update]) -> "SkewedSketch":
        for update in updates:
            self.update(update)
        return self

    def merge(self, other: "SkewedSketch") -> "SkewedSketch":
        """Accumulator-wise sum of two sketches over the same projection"""
        if self.identity != other.identity:
            raise IncompatibleSketchError(
                f"cannot merge sketch {self.identity} with {other.identity}"
            )
        merged = SkewedSketch(
            self.alpha,
            self.k,
            self.seed,
            accumulators=self.accumulators + other.accumulators,
            update_count=self.update_count + other.update_count,
            compensated=self.compensated or other.compensated,
        )
        merged._compensation = self._compensation + other._compensation
        return merged

    def estimate(self, method: Method = Method.GM, corrected: bool = True) -> EstimateReport:
        """
        Estimate F_(alpha) from the accumulators.

        For alpha < 1 the aggregated signal must be non-negative at this point;
        the sketch cannot check that.
        """
        method = Method(method)
        x = self.values
        if not np.any(x):
            variance = estimators.variance_factor(method, self.alpha, self.k)
            logger.warning("all accumulators are zero; estimate is 0")
            return EstimateReport(0.0, method, self.k, variance, self.alpha, degenerate=True)
        return estimators.estimate(x, method, self.alpha, corrected=corrected)


def update(sketch: SkewedSketch, u: Update) -> SkewedSketch:
    return sketch.update(u)


def merge(a: SkewedSketch, b: SkewedSketch) -> SkewedSketch:
    return a.merge(b)


def estimate(sketch: SkewedSketch, method: Method = Method.GM) -> EstimateReport:
    return sketch.estimate(method)
