"""
Chernoff exponents and sample sizes for the scale estimators.

Every rate r satisfies Pr(one-sided deviation of at least epsilon F) <= exp(-k r),
and G = epsilon^2 / r. The inner constants (C_R, C_L for the geometric mean,
t1*, t2* for the harmonic mean) maximize the Chernoff exponent; they are found
as roots of its derivative inside brackets that avoid the poles at the ends.
"""
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple
import logging
import math

import numpy as np

from .estimators import gm_log_bracket, gm_variance_factor
from .interfaces.base import ComplexityResult, Method, Side, TailBoundSpec
from .numerics import (
    EULER_GAMMA,
    RootBracket,
    digamma,
    find_root,
    log_gamma,
)
from .schema.result import ConfigurationError, DomainError, NumericError
from .schema.schema import field as read_field, integer, number
from .stable import kappa

logger = logging.getLogger(__name__)

EPSILON = number().finite().positive()
DELTA = number().within(0.0, 1.0, lo_open=True, hi_open=True)
K0 = integer().within(2, 2**63 - 1)

BRACKET_EDGE = 1e-6
SERIES_TOL = 1e-15
SERIES_MAX_TERMS = 2000
# largest ratio between the biggest alternating series term and the sum
SERIES_CANCELLATION = 1e6
SCAN_START = 0.01
SCAN_STEPS = 120
# Laplace integral grid over v = alpha log r: LAPLACE_DENSITY points per min(alpha, 1 - alpha)
LAPLACE_DENSITY = 16
LAPLACE_LOWER = -40.0
LAPLACE_CUTOFF = 800.0


def _epsilon(epsilon: float, side: Side) -> float:
    epsilon = read_field("epsilon", EPSILON, epsilon)
    if side is Side.LEFT and not epsilon < 1.0:
        raise DomainError(f"the left tail needs epsilon < 1, got {epsilon!r}")
    return epsilon


def _scan_bracket(
    f: Callable[[float], float], lo: float, start: float, limit: float = math.inf
) -> RootBracket:
    """
    Doubles from `start` until f changes sign relative to f(lo). Once f fails
    to evaluate at some x, later steps bisect towards that x instead.
    """
    f_lo = f(lo)
    prev, x = lo, start
    failed: Optional[float] = None
    for _ in range(SCAN_STEPS):
        x = min(x, limit)
        try:
            f_x = f(x)
        except NumericError as error:
            logger.debug("scan step at x=%r failed (%s)", x, error.message)
            failed = x
            x = 0.5 * (prev + x)
            continue
        if (f_x > 0.0) != (f_lo > 0.0):
            return RootBracket(prev, x)
        if x >= limit:
            break
        prev = x
        x = 2.0 * x if failed is None else 0.5 * (x + failed)
    raise NumericError(f"no sign change found while scanning from {lo!r}")


# geometric mean


def _gm_right_log_mgf(alpha: float, c: float) -> float:
    kap = kappa(alpha)
    return (
        math.log(math.cos(0.5 * math.pi * kap * c))
        + math.log(2.0 / math.pi * math.sin(0.5 * math.pi * alpha * c))
        + log_gamma(alpha * c)
        + log_gamma(1.0 - c)
    )


def gm_right_condition(alpha: float, epsilon: float, c: float) -> float:
    """Negated derivative of the right exponent in C"""
    kap = kappa(alpha)
    return (
        EULER_GAMMA * (alpha - 1.0)
        - math.log1p(epsilon)
        - 0.5 * math.pi * kap * math.tan(0.5 * math.pi * kap * c)
        + 0.5 * math.pi * alpha / math.tan(0.5 * math.pi * alpha * c)
        + alpha * digamma(alpha * c)
        - digamma(1.0 - c)
    )


def _gm_right_exponent(alpha: float, epsilon: float, c: float) -> float:
    return (
        c * math.log1p(epsilon)
        - c * EULER_GAMMA * (alpha - 1.0)
        - _gm_right_log_mgf(alpha, c)
    )


@lru_cache(maxsize=1024)
def gm_right_rate(alpha: float, epsilon: float) -> TailBoundSpec:
    """Right tail exponent of the geometric mean estimator"""
    epsilon = _epsilon(epsilon, Side.RIGHT)
    kappa(alpha)
    bracket = RootBracket(BRACKET_EDGE, 1.0 - BRACKET_EDGE)

    def condition(c: float) -> float:
        return gm_right_condition(alpha, epsilon, c)

    # the large-k closed form only seeds the search
    guess = math.log1p(epsilon) / gm_variance_factor(alpha)
    guess = min(max(guess, bracket.lo), bracket.hi)
    if bracket.lo < guess < bracket.hi:
        if condition(guess) < 0.0:
            bracket = RootBracket(guess, bracket.hi)
        else:
            bracket = RootBracket(bracket.lo, guess)
    c = find_root(condition, bracket)
    return TailBoundSpec(
        alpha=alpha,
        epsilon=epsilon,
        side=Side.RIGHT,
        estimator=Method.GM,
        rate=_gm_right_exponent(alpha, epsilon, c),
        inner_constant=c,
        residual=condition(c),
    )


def _gm_left_log_h(alpha: float, c: float) -> float:
    # log of cos(kappa pi C/2) Gamma(1+C) / (cos(alpha pi C/2) Gamma(1 + alpha C))
    kap = kappa(alpha)
    return (
        math.log(math.cos(0.5 * math.pi * kap * c))
        - math.log(math.cos(0.5 * math.pi * alpha * c))
        + log_gamma(1.0 + c)
        - log_gamma(1.0 + alpha * c)
    )


def _gm_left_dlog_h(alpha: float, c: float) -> float:
    kap = kappa(alpha)
    return (
        -0.5 * math.pi * kap * math.tan(0.5 * math.pi * kap * c)
        + 0.5 * math.pi * alpha * math.tan(0.5 * math.pi * alpha * c)
        + digamma(1.0 + c)
        - alpha * digamma(1.0 + alpha * c)
    )


def _gm_left_normalizer(alpha: float, k0: Optional[int]) -> float:
    """k0 log of the finite-k bracket, or its k0 -> infinity limit"""
    if k0 is None:
        return -EULER_GAMMA * (alpha - 1.0)
    return k0 * gm_log_bracket(alpha, k0)


def gm_left_condition(
    alpha: float, epsilon: float, c: float, k0: Optional[int] = None
) -> float:
    """Negated derivative of the left exponent in C"""
    return (
        math.log1p(-epsilon)
        + _gm_left_normalizer(alpha, k0)
        + _gm_left_dlog_h(alpha, c)
    )


@lru_cache(maxsize=1024)
def gm_left_rate(
    alpha: float, epsilon: float, k0: Optional[int] = None
) -> TailBoundSpec:
    """
    Left tail exponent of the geometric mean estimator.

    With k0 = None the normalizer takes its k -> infinity limit; a finite k0
    keeps the exact bracket, which is the valid choice for a sketch of k0
    samples.
    """
    epsilon = _epsilon(epsilon, Side.LEFT)
    kappa(alpha)
    if k0 is not None:
        k0 = read_field("k0", K0, k0)
    normalizer = _gm_left_normalizer(alpha, k0)

    def condition(c: float) -> float:
        return gm_left_condition(alpha, epsilon, c, k0)

    if alpha > 1.0:
        # cos(alpha pi C / 2) vanishes at C = 1/alpha
        bracket = RootBracket(BRACKET_EDGE, 1.0 / alpha - BRACKET_EDGE)
    else:
        bracket = _scan_bracket(condition, BRACKET_EDGE, 1.0)
    c = find_root(condition, bracket)
    rate = -c * math.log1p(-epsilon) - _gm_left_log_h(alpha, c) - c * normalizer
    return TailBoundSpec(
        alpha=alpha,
        epsilon=epsilon,
        side=Side.LEFT,
        estimator=Method.GM,
        rate=rate,
        inner_constant=c,
        k0=k0,
        residual=condition(c),
    )


def gm_normalizer_limit(alpha: float, k: int) -> float:
    """[cos(kappa pi/(2k)) (2/pi) Gamma(alpha/k) Gamma(1 - 1/k) sin(pi alpha/(2k))]^k"""
    return math.exp(k * gm_log_bracket(alpha, k))


def gm_right_constant_asymptote(delta: float, epsilon: float) -> float:
    """G_R near alpha = 1 +- delta: epsilon^2 / (log(1+eps) - 2 sqrt(delta log(1+eps)))"""
    epsilon = _epsilon(epsilon, Side.RIGHT)
    if not delta >= 0.0:
        raise DomainError(f"delta must be non-negative, got {delta!r}")
    log_eps = math.log1p(epsilon)
    denominator = log_eps - 2.0 * math.sqrt(delta * log_eps)
    if not denominator > 0.0:
        raise DomainError(f"delta={delta!r} is too large for the asymptote at epsilon={epsilon!r}")
    return epsilon**2 / denominator


def symmetric_gm_reference_variance(alpha: float) -> float:
    """(alpha^2 + 2) pi^2 / 12, the symmetric-projection geometric mean constant"""
    if not 0.0 <= alpha <= 2.0:
        raise DomainError(f"alpha must lie in [0, 2], got {alpha!r}")
    return (alpha * alpha + 2.0) * math.pi**2 / 12.0


# harmonic mean


def _ml_series(alpha: float, t: float, sign: float) -> Tuple[float, float]:
    """
    log f(t) and f'(t) / f(t) for f(t) = sum_m Gamma(1+alpha)^m / Gamma(1+m alpha) (sign t)^m.

    Terms are summed relative to the largest one; the sum stops past the peak
    once a term falls below SERIES_TOL of it.
    """
    if t == 0.0:
        return 0.0, sign
    log_base = log_gamma(1.0 + alpha) + math.log(t)
    logs = [0.0]
    peak = 0.0
    m = 0
    while True:
        m += 1
        if m > SERIES_MAX_TERMS:
            raise NumericError(
                f"series at t={t!r} did not converge within {SERIES_MAX_TERMS} terms"
            )
        lt = m * log_base - log_gamma(1.0 + m * alpha)
        logs.append(lt)
        peak = max(peak, lt)
        # the alternating sum lies in (0, 1]
        if sign < 0.0 and peak > math.log(SERIES_CANCELLATION):
            raise NumericError(f"series at t={t!r} lost its precision to cancellation")
        if lt < logs[-2] and lt - peak < math.log(SERIES_TOL):
            break
    terms = [sign**n * math.exp(lt - peak) for n, lt in enumerate(logs)]
    total = math.fsum(terms)
    slope = math.fsum(n * term for n, term in enumerate(terms))
    if not total > 0.0 or SERIES_CANCELLATION * abs(total) < 1.0:
        raise NumericError(f"series at t={t!r} lost its precision to cancellation")
    if sign < 0.0 and SERIES_CANCELLATION * abs(slope) < 1.0:
        raise NumericError(f"derivative series at t={t!r} lost its precision to cancellation")
    return peak + math.log(total), slope / (t * total)


def _ml_laplace(alpha: float, t: float) -> Tuple[float, float]:
    """
    log f(t) and f'(t) / f(t) for the alternating series (sign = -1) from its
    Laplace form: with z = Gamma(1+alpha) t,

        f(t) = sin(pi alpha) / pi * int_0^inf exp(-z r) r^(alpha-1)
               / (r^(2 alpha) + 2 r^alpha cos(pi alpha) + 1) dr.

    After r = exp(v / alpha) the integrand is analytic and decays at both ends,
    so the trapezoid rule on a uniform grid converges geometrically.
    """
    scale = math.exp(log_gamma(1.0 + alpha))
    z = scale * t
    step = min(alpha, 1.0 - alpha) / LAPLACE_DENSITY
    hi = max(alpha * math.log(LAPLACE_CUTOFF / z), LAPLACE_LOWER + step)
    v = np.arange(LAPLACE_LOWER, hi, step)
    r = np.exp(v / alpha)
    e = np.exp(v)
    weights = e * np.exp(-z * r) / (e * e + 2.0 * e * math.cos(math.pi * alpha) + 1.0)
    i0 = float(np.sum(weights))
    i1 = float(np.sum(weights * r))
    if not i0 > 0.0:
        raise NumericError(f"Laplace integral at t={t!r} underflowed")
    factor = math.sin(math.pi * alpha) / (math.pi * alpha) * step
    return math.log(factor * i0), -scale * i1 / i0


def _ml_log_slope(alpha: float, t: float, sign: float) -> Tuple[float, float]:
    """The series where it resolves; the alternating one falls back to its Laplace form"""
    try:
        return _ml_series(alpha, t, sign)
    except NumericError:
        if sign > 0.0:
            raise
        return _ml_laplace(alpha, t)


def hm_right_condition(alpha: float, epsilon: float, t: float) -> float:
    return _ml_log_slope(alpha, t, -1.0)[1] + 1.0 / (1.0 + epsilon)


def hm_left_condition(alpha: float, epsilon: float, t: float) -> float:
    return -_ml_log_slope(alpha, t, 1.0)[1] + 1.0 / (1.0 - epsilon)


def _hm_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"the harmonic mean needs 0 < alpha < 1, got {alpha!r}")
    return alpha


@lru_cache(maxsize=1024)
def hm_right_rate(alpha: float, epsilon: float) -> TailBoundSpec:
    """Right tail exponent of the uncorrected harmonic mean estimator"""
    alpha = _hm_alpha(alpha)
    epsilon = _epsilon(epsilon, Side.RIGHT)

    def condition(t: float) -> float:
        return hm_right_condition(alpha, epsilon, t)

    t = find_root(condition, _scan_bracket(condition, 0.0, SCAN_START))
    log_f, _ = _ml_log_slope(alpha, t, -1.0)
    return TailBoundSpec(
        alpha=alpha,
        epsilon=epsilon,
        side=Side.RIGHT,
        estimator=Method.HM,
        rate=-log_f - t / (1.0 + epsilon),
        inner_constant=t,
        residual=condition(t),
    )


@lru_cache(maxsize=1024)
def hm_left_rate(alpha: float, epsilon: float) -> TailBoundSpec:
    """Left tail exponent of the uncorrected harmonic mean estimator"""
    alpha = _hm_alpha(alpha)
    epsilon = _epsilon(epsilon, Side.LEFT)

    def condition(t: float) -> float:
        return hm_left_condition(alpha, epsilon, t)

    t = find_root(condition, _scan_bracket(condition, 0.0, SCAN_START))
    log_f, _ = _ml_log_slope(alpha, t, 1.0)
    return TailBoundSpec(
        alpha=alpha,
        epsilon=epsilon,
        side=Side.LEFT,
        estimator=Method.HM,
        rate=-log_f + t / (1.0 - epsilon),
        inner_constant=t,
        residual=condition(t),
    )


def hm_rates(alpha: float, epsilon: float) -> Dict[Side, TailBoundSpec]:
    """Both harmonic mean exponents; the left one only when epsilon < 1"""
    rates = {Side.RIGHT: hm_right_rate(alpha, epsilon)}
    if epsilon < 1.0:
        rates[Side.LEFT] = hm_left_rate(alpha, epsilon)
    return rates


# alpha = 0.5 maximum likelihood


def mle05_right_rate(epsilon: float) -> TailBoundSpec:
    epsilon = _epsilon(epsilon, Side.RIGHT)
    rate = math.log1p(epsilon) - 0.5 + 0.5 / (1.0 + epsilon) ** 2
    return TailBoundSpec(0.5, epsilon, Side.RIGHT, Method.MLE05, rate, math.nan)


def mle05_left_rate(epsilon: float) -> TailBoundSpec:
    epsilon = _epsilon(epsilon, Side.LEFT)
    rate = math.log1p(-epsilon) - 0.5 + 0.5 / (1.0 - epsilon) ** 2
    return TailBoundSpec(0.5, epsilon, Side.LEFT, Method.MLE05, rate, math.nan)


def mle05_rates(epsilon: float) -> Dict[Side, TailBoundSpec]:
    """Closed-form exponents of the uncorrected alpha = 0.5 MLE"""
    rates = {Side.RIGHT: mle05_right_rate(epsilon)}
    if epsilon < 1.0:
        rates[Side.LEFT] = mle05_left_rate(epsilon)
    return rates


def _check_estimator(estimator: Method, alpha: float) -> Method:
    estimator = Method(estimator)
    if estimator is Method.HM and not alpha < 1.0:
        raise ConfigurationError(f"hm needs alpha < 1, got {alpha!r}")
    if estimator is Method.MLE05 and alpha != 0.5:
        raise ConfigurationError(f"mle05 needs alpha = 0.5, got {alpha!r}")
    if estimator not in (Method.GM, Method.HM, Method.MLE05):
        raise ConfigurationError(f"no tail bound is available for {estimator.value}")
    return estimator


def right_rate(estimator: Method, alpha: float, epsilon: float) -> TailBoundSpec:
    estimator = _check_estimator(estimator, alpha)
    if estimator is Method.GM:
        return gm_right_rate(alpha, epsilon)
    if estimator is Method.HM:
        return hm_right_rate(alpha, epsilon)
    return mle05_right_rate(epsilon)


def left_rate(
    estimator: Method, alpha: float, epsilon: float, k0: Optional[int] = None
) -> TailBoundSpec:
    estimator = _check_estimator(estimator, alpha)
    if estimator is Method.GM:
        return gm_left_rate(alpha, epsilon, k0)
    if estimator is Method.HM:
        return hm_left_rate(alpha, epsilon)
    return mle05_left_rate(epsilon)


def tail_rates(
    estimator: Method, alpha: float, epsilon: float, k0: Optional[int] = None
) -> Dict[Side, TailBoundSpec]:
    """
    Right and left exponents for `estimator`. The left side is omitted for
    epsilon >= 1, where a relative drop of epsilon is impossible.
    """
    rates = {Side.RIGHT: right_rate(estimator, alpha, epsilon)}
    if epsilon < 1.0:
        rates[Side.LEFT] = left_rate(estimator, alpha, epsilon, k0)
    return rates


def sample_complexity(
    alpha: float,
    epsilon: float,
    delta: float,
    estimator: Method = Method.GM,
    k0: Optional[int] = None,
) -> ComplexityResult:
    """k = ceil(G log(2/delta) / epsilon^2) with G the larger side constant"""
    delta = read_field("delta", DELTA, delta)
    rates = tail_rates(estimator, alpha, epsilon, k0)
    G = max(spec.G for spec in rates.values())
    k = max(2, math.ceil(G * math.log(2.0 / delta) / epsilon**2))
    logger.debug("sample complexity %s alpha=%r eps=%r: G=%r k=%d", estimator, alpha, epsilon, G, k)
    return ComplexityResult(k=k, G=G, epsilon=epsilon, delta=delta)
