"""
Monte Carlo harnesses: empirical variance factors and tail frequencies
checked against their analytic counterparts, with F = 1 throughout.

Trial t draws its k samples from the keyed substream (seed, t), so neither
the trial count nor the worker count changes any trial's samples.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from ..core import bounds, estimators
from ..core.interfaces.base import (
    ExperimentRow,
    Method,
    Side,
    StableParams,
    TailBoundSpec,
)
from ..core.schema.result import ConfigurationError, DomainError, NumericError
from ..core.stable import sample
from ..sketch.prng import keyed_uniforms

logger = logging.getLogger(__name__)

CHUNK_TRIALS = 4096
SYMMETRIC_REFERENCE = "symmetric-gm"


@dataclass(frozen=True)
class ExperimentOptions:
    """Shared Monte Carlo settings"""

    k: int
    trials: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.k < 2:
            raise DomainError(f"k must be at least 2, got {self.k!r}")
        if self.trials < 1:
            raise DomainError(f"trials must be at least 1, got {self.trials!r}")
        if self.workers < 1:
            raise DomainError(f"workers must be at least 1, got {self.workers!r}")


def _draw_chunk(params: StableParams, k: int, seed: int, start: int, stop: int) -> np.ndarray:
    us, ws = zip(*(keyed_uniforms(seed, t, k) for t in range(start, stop)))
    return np.asarray(sample(params, np.stack(us), np.stack(ws)))


def draw_samples(params: StableParams, options: ExperimentOptions) -> np.ndarray:
    """(trials, k) matrix of S(alpha, beta, F) draws"""
    starts = range(0, options.trials, CHUNK_TRIALS)
    chunks = [(s, min(s + CHUNK_TRIALS, options.trials)) for s in starts]

    def run(chunk: Tuple[int, int]) -> np.ndarray:
        return _draw_chunk(params, options.k, options.seed, *chunk)

    if options.workers == 1:
        parts = [run(chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            parts = list(pool.map(run, chunks))
    return np.concatenate(parts, axis=0)


def _moments(estimates: np.ndarray, k: int) -> Tuple[float, float]:
    mean = float(np.mean(estimates))
    variance = float(np.var(estimates, ddof=1)) if estimates.size > 1 else 0.0
    return mean, k * variance


def applicable_methods(alpha: float, beta: Optional[float] = None) -> List[Method]:
    """Estimators defined at alpha, in output order"""
    methods = [Method.GM]
    if beta is not None:
        methods.append(Method.GM_BETA)
    if alpha < 1.0:
        methods.append(Method.HM)
    if alpha == 0.5:
        methods.append(Method.MLE05)
    methods.append(Method.OP)
    return methods


def variance_rows(
    alpha: float,
    options: ExperimentOptions,
    methods: Optional[Sequence[Method]] = None,
    beta: Optional[float] = None,
) -> List[ExperimentRow]:
    """One row per estimator plus the symmetric-projection reference"""
    if alpha == 1.0:
        raise ConfigurationError("no estimator is defined at alpha = 1")
    methods = list(methods) if methods else applicable_methods(alpha, beta)
    samples = draw_samples(StableParams(alpha), options)
    rows = []
    for method in methods:
        method = Method(method)
        if method is Method.GM_BETA:
            skew = 1.0 if beta is None else beta
            data = draw_samples(StableParams(alpha, skew), options)
        else:
            skew, data = 1.0, samples
        estimates = estimators.estimate_batch(data, method, alpha, beta=skew)
        mean, empirical_v = _moments(estimates, options.k)
        theoretical_v = estimators.variance_factor(method, alpha, options.k, beta=skew)
        logger.info(
            "alpha=%r %s: V empirical %.4f, analytic %.4f",
            alpha,
            method.value,
            empirical_v,
            theoretical_v,
        )
        rows.append(
            ExperimentRow(
                alpha=alpha,
                estimator=method.value,
                k=options.k,
                trials=options.trials,
                empirical_mean=mean,
                empirical_V=empirical_v,
                theoretical_V=theoretical_v,
            )
        )
    rows.append(
        ExperimentRow(
            alpha=alpha,
            estimator=SYMMETRIC_REFERENCE,
            k=options.k,
            trials=options.trials,
            theoretical_V=bounds.symmetric_gm_reference_variance(alpha),
        )
    )
    return rows


def _rates(
    method: Method, alpha: float, epsilon: float, k0: Optional[int]
) -> Dict[Side, TailBoundSpec]:
    sides = [Side.RIGHT, Side.LEFT] if epsilon < 1.0 else [Side.RIGHT]
    rates = {}
    for side in sides:
        try:
            if side is Side.RIGHT:
                rates[side] = bounds.right_rate(method, alpha, epsilon)
            else:
                rates[side] = bounds.left_rate(method, alpha, epsilon, k0)
        except NumericError as error:
            logger.warning(
                "alpha=%r epsilon=%r: %s bound skipped (%s)",
                alpha,
                epsilon,
                side.value,
                error.message,
            )
    return rates


def tail_rows(
    alpha: float,
    method: Method,
    epsilons: Sequence[float],
    options: ExperimentOptions,
) -> List[ExperimentRow]:
    """
    Empirical tail frequencies beside exp(-k rate) for each epsilon and side.

    The harmonic mean and alpha = 0.5 MLE are run uncorrected, which is the
    form their exponents bound; the left geometric mean bound uses k0 = k.
    """
    method = Method(method)
    if method not in (Method.GM, Method.HM, Method.MLE05):
        raise ConfigurationError(f"no tail bound is available for {method.value}")
    samples = draw_samples(StableParams(alpha), options)
    estimates = estimators.estimate_batch(samples, method, alpha, corrected=False)
    mean, empirical_v = _moments(estimates, options.k)
    theoretical_v = estimators.variance_factor(method, alpha, options.k)
    rows = []
    k0 = options.k if method is Method.GM else None
    for epsilon in epsilons:
        rates = _rates(method, alpha, epsilon, k0)
        for side in (Side.RIGHT, Side.LEFT):
            spec = rates.get(side)
            if spec is None:
                continue
            if side is Side.RIGHT:
                hits = estimates >= 1.0 + epsilon
            else:
                hits = estimates <= 1.0 - epsilon
            rows.append(
                ExperimentRow(
                    alpha=alpha,
                    estimator=method.value,
                    k=options.k,
                    trials=options.trials,
                    empirical_mean=mean,
                    empirical_V=empirical_v,
                    theoretical_V=theoretical_v,
                    epsilon=epsilon,
                    side=side.value,
                    empirical_tail=float(np.mean(hits)),
                    bound_tail=spec.bound(options.k),
                )
            )
    return rows

