"""
Turnstile stream files, a synthetic workload generator and the exact oracle.

A stream file holds one "<index> <delta>" update per line; '#' starts a
comment line and blank lines are ignored.
"""
from collections import defaultdict
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Optional, TextIO
import logging
import math

import numpy as np

from ..core.interfaces.base import INDEX, StreamUpdate
from ..core.schema.result import DomainError, PreconditionError, StreamParseError
from ..core.schema.schema import integer_text, number_text

logger = logging.getLogger(__name__)

INDEX_TEXT = integer_text().refine(lambda v: INDEX.is_valid(v), "positive index")
DELTA_TEXT = number_text().finite()

MAX_INSERT = 10


class Distribution(str, Enum):
    """Index distribution of generated updates"""

    ZIPF = "zipf"
    UNIFORM = "uniform"


def parse_line(line: str, line_number: int) -> Optional[StreamUpdate]:
    """One update, or None for comments and blank lines"""
    text = line.strip()
    if not text or text.startswith("#"):
        return None
    tokens = text.split()
    if len(tokens) != 2:
        raise StreamParseError(line_number, f"expected '<index> <delta>', got {text!r}")
    index = INDEX_TEXT.read(tokens[0])
    if index.error:
        raise StreamParseError(line_number, index.error.message)
    delta = DELTA_TEXT.read(tokens[1])
    if delta.error:
        raise StreamParseError(line_number, delta.error.message)
    return StreamUpdate(index.ok, delta.ok)  # type: ignore[arg-type]


def read_stream(lines: Iterable[str]) -> Iterator[StreamUpdate]:
    """Lazily parses updates; line numbers start at 1"""
    for line_number, line in enumerate(lines, start=1):
        update = parse_line(line, line_number)
        if update is not None:
            yield update


def format_delta(delta: float) -> str:
    if float(delta).is_integer():
        return str(int(delta))
    return repr(float(delta))


def write_stream(updates: Iterable[StreamUpdate], out: TextIO) -> int:
    """Writes updates one per line; returns the number written"""
    count = 0
    for update in updates:
        out.write(f"{update.index} {format_delta(update.increment)}\n")
        count += 1
    return count


def _zipf_indices(rng: np.random.Generator, d: int, s: float, n: int) -> np.ndarray:
    weights = np.arange(1, d + 1, dtype=np.float64) ** (-s)
    cdf = np.cumsum(weights)
    draws = rng.random(n) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, draws, side="right"), d - 1) + 1


def generate(
    d: int,
    n_updates: int,
    distribution: Distribution = Distribution.ZIPF,
    zipf_s: float = 1.1,
    deletion_fraction: float = 0.0,
    seed: int = 0,
) -> Iterator[StreamUpdate]:
    """
    Synthetic Turnstile stream whose signal stays non-negative.

    Inserts add 1..10 to the chosen index. A deletion removes between 1 and
    the index's current mass; an index with no mass gets an insert instead.
    """
    if d < 1:
        raise DomainError(f"D must be at least 1, got {d!r}")
    if n_updates < 0:
        raise DomainError(f"the update count must be non-negative, got {n_updates!r}")
    if not 0.0 <= deletion_fraction < 1.0:
        raise DomainError(f"deletion fraction must lie in [0, 1), got {deletion_fraction!r}")
    distribution = Distribution(distribution)
    rng = np.random.default_rng(seed)
    if distribution is Distribution.ZIPF:
        indices = _zipf_indices(rng, d, zipf_s, n_updates)
    else:
        indices = rng.integers(1, d + 1, size=n_updates)
    deletes = rng.random(n_updates) < deletion_fraction
    inserts = rng.integers(1, MAX_INSERT + 1, size=n_updates)
    fractions = rng.random(n_updates)

    mass: Dict[int, int] = defaultdict(int)
    for t in range(n_updates):
        index = int(indices[t])
        if deletes[t] and mass[index] > 0:
            amount = -(1 + int(fractions[t] * mass[index]))
        else:
            amount = int(inserts[t])
        mass[index] += amount
        yield StreamUpdate(index, float(amount))


def aggregate(updates: Iterable[StreamUpdate]) -> Dict[int, float]:
    """Final signal A[i]; each entry is a correctly rounded sum, so order does not matter"""
    parts: Dict[int, List[float]] = defaultdict(list)
    for update in updates:
        parts[update.index].append(update.increment)
    return {index: math.fsum(values) for index, values in parts.items()}


def exact_moment(updates: Iterable[StreamUpdate], alpha: float) -> float:
    """sum_i A[i]^alpha over the non-zero entries of a non-negative signal"""
    signal = aggregate(updates)
    values = []
    for index in sorted(signal):
        value = signal[index]
        if value < 0.0:
            raise PreconditionError(index, value)
        if value > 0.0:
            values.append(value)
    if alpha == 1.0:
        return math.fsum(values)
    return math.fsum(value**alpha for value in values)
