from typing import Callable

import numpy as np
import pytest

from skewsketch.core.interfaces.base import StableParams
from skewsketch.core.stable import sample

Draw = Callable[..., np.ndarray]


def _draw(
    alpha: float, size, seed: int = 0, beta: float = 1.0, scale: float = 1.0
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    u = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size)
    w = rng.exponential(1.0, size)
    return np.asarray(sample(StableParams(alpha, beta, scale), u, w))


@pytest.fixture
def stable_draws() -> Draw:
    """stable_draws(alpha, size, seed=0, beta=1.0, scale=1.0) -> S(alpha, beta, scale) draws"""
    return _draw


@pytest.fixture
def stream_file(tmp_path):
    """Writes (index, delta) pairs as a stream file and returns its path"""

    def write(updates, name: str = "stream.txt"):
        path = tmp_path / name
        path.write_text("".join(f"{i} {d}\n" for i, d in updates))
        return path

    return write


@pytest.fixture
def tail_slack() -> Callable[..., float]:
    """tail_slack(p, trials, sigmas=3.0) -> sigmas binomial standard errors at probability p"""

    def slack(p: float, trials: int, sigmas: float = 3.0) -> float:
        return sigmas * float(np.sqrt(max(p * (1.0 - p), 0.0) / trials))

    return slack
