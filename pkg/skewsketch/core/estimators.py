"""
Scale estimators for k samples of S(alpha, 1, F).

Each estimator has a vectorized kernel over a (trials, k) matrix; the
single-sample functions validate, run the kernel on one row and wrap the
value in an EstimateReport.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple
import logging
import math

import numpy as np

from .interfaces.base import BETA, EstimateReport, Method, OptimalPower
from .numerics import (
    RootBracket,
    find_root,
    gamma_fn,
    log_gamma,
    minimize_1d,
)
from .schema.result import BracketError, ConfigurationError, DomainError, NumericError
from .schema.schema import field as read_field
from .stable import dlog_abs_moment, kappa, log_abs_moment

logger = logging.getLogger(__name__)

MLE05_VARIANCE = 0.5

# search cap for lambda* when alpha < 1
LAMBDA_CAP = 50.0
# g(lambda) uses its lambda -> 0 limit inside this window
LAMBDA_ZERO_WINDOW = 1e-6
LAMBDA_EDGE = 1e-6
LAMBDA_GRID_POINTS = 400
LAMBDA_POLISH_WIDTH = 1e-4
# lambda* this close to the lower search end is reported as capped
LAMBDA_CAP_MARGIN = 1e-2


def gm_variance_factor(alpha: float) -> float:
    """pi^2/12 (alpha^2 + 2 - 3 kappa^2)"""
    k = kappa(alpha)
    return math.pi**2 / 12.0 * (alpha * alpha + 2.0 - 3.0 * k * k)


def hm_variance_factor(alpha: float) -> float:
    """2 Gamma(1+alpha)^2 / Gamma(1+2 alpha) - 1"""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"the harmonic mean needs 0 < alpha < 1, got {alpha!r}")
    log_ratio = 2.0 * log_gamma(1.0 + alpha) - log_gamma(1.0 + 2.0 * alpha)
    return math.expm1(math.log(2.0) + log_ratio)


def gm_log_bracket(alpha: float, k: int) -> float:
    """log of cos(kappa pi/(2k)) (2/pi) sin(pi alpha/(2k)) Gamma(1 - 1/k) Gamma(alpha/k)"""
    if k < 2:
        raise DomainError(f"the geometric mean needs k >= 2, got {k!r}")
    kap = kappa(alpha)
    return (
        math.log(math.cos(0.5 * math.pi * kap / k))
        + math.log(2.0 / math.pi * math.sin(0.5 * math.pi * alpha / k))
        + log_gamma(1.0 - 1.0 / k)
        + log_gamma(alpha / k)
    )


def gm_log_denominator(alpha: float, k: int) -> float:
    """log E prod |x_j|^(alpha/k) for unit scale, kept in log space for large k"""
    kap = kappa(alpha)
    return k * gm_log_bracket(alpha, k) - math.log(math.cos(0.5 * math.pi * kap))


def _log_b(alpha: float, k: int, t: float) -> float:
    # (2/pi) sin(pi alpha t/(2k)) Gamma(1 - t/k) Gamma(alpha t/k)
    return (
        math.log(2.0 / math.pi * math.sin(0.5 * math.pi * alpha * t / k))
        + log_gamma(1.0 - t / k)
        + log_gamma(alpha * t / k)
    )


def _theta(alpha: float, beta: float) -> float:
    if alpha == 2.0:
        return 0.0
    return math.atan(beta * math.tan(0.5 * math.pi * alpha))


def gm_beta_log_denominator(alpha: float, beta: float, k: int) -> float:
    """log of cos^k(theta/k) (1 + tan^2 theta)^(1/2) B(1)^k"""
    if k < 2:
        raise DomainError(f"the geometric mean needs k >= 2, got {k!r}")
    if alpha == 1.0:
        raise DomainError("the geometric mean is undefined at alpha = 1")
    theta = _theta(alpha, beta)
    return (
        k * math.log(math.cos(theta / k))
        - math.log(math.cos(theta))
        + k * _log_b(alpha, k, 1.0)
    )


def gm_beta_variance(alpha: float, beta: float, k: int) -> float:
    """
    Exact finite-k variance factor k * Var / F^2 of the general-beta
    geometric mean. Infinite for k <= 2.
    """
    if alpha == 1.0:
        raise DomainError("the geometric mean is undefined at alpha = 1")
    if k < 2:
        raise DomainError(f"the geometric mean needs k >= 2, got {k!r}")
    if k <= 2:
        return math.inf
    theta = _theta(alpha, beta)
    log_ratio = (
        k * math.log(math.cos(2.0 * theta / k))
        + k * _log_b(alpha, k, 2.0)
        - 2.0 * k * math.log(math.cos(theta / k))
        - 2.0 * k * _log_b(alpha, k, 1.0)
    )
    return k * math.expm1(log_ratio)


def power_variance_factor(lam: float, alpha: float) -> float:
    """
    g(lambda; alpha) = (E|Z|^(2 lambda alpha) / (E|Z|^(lambda alpha))^2 - 1) / lambda^2.

    Near lambda = 0 the geometric mean factor is returned; inf on overflow.
    """
    if abs(lam) < LAMBDA_ZERO_WINDOW:
        return gm_variance_factor(alpha)
    exponent = log_abs_moment(alpha, 2.0 * lam * alpha) - 2.0 * log_abs_moment(
        alpha, lam * alpha
    )
    if exponent > 700.0:
        return math.inf
    return math.expm1(exponent) / (lam * lam)


def _power_variance_slope(lam: float, alpha: float) -> float:
    # g' = R'/lambda^2 - 2 (R - 1)/lambda^3 with R the moment ratio
    exponent = log_abs_moment(alpha, 2.0 * lam * alpha) - 2.0 * log_abs_moment(
        alpha, lam * alpha
    )
    ratio = math.exp(exponent)
    slope = ratio * (
        2.0 * alpha * dlog_abs_moment(alpha, 2.0 * lam * alpha)
        - 2.0 * alpha * dlog_abs_moment(alpha, lam * alpha)
    )
    return slope / lam**2 - 2.0 * math.expm1(exponent) / lam**3


def _lambda_domain(alpha: float) -> Tuple[float, float]:
    if alpha < 1.0:
        return -LAMBDA_CAP, 0.5 - LAMBDA_EDGE
    return -0.5 / alpha + LAMBDA_EDGE, 0.5 - LAMBDA_EDGE


@lru_cache(maxsize=256)
def solve_optimal_lambda(alpha: float) -> OptimalPower:
    """
    lambda* = argmin g(lambda; alpha).

    A grid scan locates the basin, Brent's method refines it, and the root of
    g' polishes the result. alpha = 2 reduces to the mean of x^2 / 2.
    """
    if alpha == 1.0:
        raise DomainError("the optimal power estimator is undefined at alpha = 1")
    if not 0.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (0, 2], got {alpha!r}")
    if alpha == 2.0:
        return OptimalPower(alpha=2.0, lambda_star=1.0, g_min=2.0)

    lo, hi = _lambda_domain(alpha)
    grid = np.linspace(lo, hi, LAMBDA_GRID_POINTS)
    values = [power_variance_factor(float(lam), alpha) for lam in grid]
    best = int(np.argmin(values))
    a = float(grid[max(best - 1, 0)])
    b = float(grid[min(best + 1, len(grid) - 1)])
    lam, g_min = minimize_1d(lambda v: power_variance_factor(v, alpha), a, b)

    if abs(lam) > 1e-3:
        bracket = RootBracket(
            max(lam - LAMBDA_POLISH_WIDTH, lo), min(lam + LAMBDA_POLISH_WIDTH, hi)
        )
        try:
            polished = find_root(lambda v: _power_variance_slope(v, alpha), bracket)
        except (BracketError, NumericError, DomainError, OverflowError) as error:
            logger.debug("lambda* polish skipped at alpha=%r: %s", alpha, error)
        else:
            g_polished = power_variance_factor(polished, alpha)
            if g_polished <= g_min + 1e-12:
                lam, g_min = polished, g_polished
    if lam - lo < LAMBDA_CAP_MARGIN:
        logger.warning(
            "lambda* at alpha=%r sits on the search edge %r; g keeps falling past it", alpha, lo
        )
    logger.debug("lambda*(%r) = %r, g = %r", alpha, lam, g_min)
    return OptimalPower(alpha=alpha, lambda_star=lam, g_min=g_min)


def _as_matrix(samples: np.ndarray) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    if x.ndim != 2:
        raise DomainError(f"samples must be 1-D or 2-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("samples must be finite")
    return x


def _require_k(x: np.ndarray, minimum: int) -> int:
    k = x.shape[1]
    if k < minimum:
        raise DomainError(f"at least {minimum} samples are needed, got {k}")
    return k


def _require_positive(x: np.ndarray, what: str) -> None:
    if np.any(x <= 0.0):
        raise DomainError(
            f"the {what} needs positive samples; a non-positive sample means the "
            "signal was negative at evaluation time"
        )


def _gm_kernel(x: np.ndarray, log_denominator: float, alpha: float) -> np.ndarray:
    k = x.shape[1]
    absx = np.abs(x)
    zero = np.any(absx == 0.0, axis=1)
    with np.errstate(divide="ignore"):
        log_num = (alpha / k) * np.sum(np.log(absx), axis=1)
    out = np.exp(log_num - log_denominator)
    out[zero] = 0.0
    return out


def _hm_kernel(x: np.ndarray, alpha: float, corrected: bool) -> np.ndarray:
    k = x.shape[1]
    scale = k * math.cos(0.5 * math.pi * alpha) / gamma_fn(1.0 + alpha)
    out = scale / np.sum(x ** (-alpha), axis=1)
    if corrected:
        out = out * (1.0 - hm_variance_factor(alpha) / k)
    return out


def _mle05_kernel(x: np.ndarray, corrected: bool) -> np.ndarray:
    k = x.shape[1]
    out = np.sqrt(k / np.sum(1.0 / x, axis=1))
    if corrected:
        out = out * (1.0 - 0.75 / k)
    return out


def _op_kernel(x: np.ndarray, power: OptimalPower) -> np.ndarray:
    k = x.shape[1]
    alpha, lam = power.alpha, power.lambda_star
    if alpha == 2.0:
        return np.mean(x * x, axis=1) / 2.0
    p = lam * alpha
    log_m1 = log_abs_moment(alpha, p)
    log_m2 = log_abs_moment(alpha, 2.0 * p)
    mean_power = np.mean(np.abs(x) ** p, axis=1)
    correction = 1.0 - (1.0 / k) * (0.5 / lam) * (1.0 / lam - 1.0) * math.expm1(
        log_m2 - 2.0 * log_m1
    )
    return (mean_power / math.exp(log_m1)) ** (1.0 / lam) * correction


def gm_estimate(samples: np.ndarray, alpha: float) -> EstimateReport:
    """Unbiased geometric mean estimator; a zero sample yields a flagged 0"""
    x = _as_matrix(samples)
    k = _require_k(x, 2)
    value = float(_gm_kernel(x, gm_log_denominator(alpha, k), alpha)[0])
    degenerate = bool(np.any(x == 0.0))
    if degenerate:
        logger.warning("geometric mean saw a zero sample; returning 0")
    return EstimateReport(value, Method.GM, k, gm_variance_factor(alpha), alpha, degenerate)


def gm_estimate_beta(samples: np.ndarray, alpha: float, beta: float) -> EstimateReport:
    """Unbiased geometric mean for samples of S(alpha, beta, F)"""
    beta = read_field("beta", BETA, beta)
    x = _as_matrix(samples)
    k = _require_k(x, 2)
    value = float(_gm_kernel(x, gm_beta_log_denominator(alpha, beta, k), alpha)[0])
    degenerate = bool(np.any(x == 0.0))
    if degenerate:
        logger.warning("geometric mean saw a zero sample; returning 0")
    return EstimateReport(
        value, Method.GM_BETA, k, gm_beta_variance(alpha, beta, k), alpha, degenerate
    )


def hm_estimate(samples: np.ndarray, alpha: float, corrected: bool = True) -> EstimateReport:
    """Harmonic mean estimator for alpha < 1, optionally bias-corrected"""
    variance = hm_variance_factor(alpha)
    x = _as_matrix(samples)
    k = _require_k(x, 1)
    _require_positive(x, "harmonic mean")
    value = float(_hm_kernel(x, alpha, corrected)[0])
    return EstimateReport(value, Method.HM, k, variance, alpha)


def mle05_estimate(samples: np.ndarray, corrected: bool = True) -> EstimateReport:
    """Maximum likelihood estimator of the Levy scale at alpha = 0.5"""
    x = _as_matrix(samples)
    k = _require_k(x, 1)
    _require_positive(x, "alpha = 0.5 MLE")
    value = float(_mle05_kernel(x, corrected)[0])
    return EstimateReport(value, Method.MLE05, k, MLE05_VARIANCE, 0.5)


@dataclass(frozen=True)
class CentralMoments:
    """Leading-order central moments of an estimator"""

    variance: float
    third: float
    fourth: float


def mle05_central_moments(k: int, scale: float = 1.0) -> CentralMoments:
    """Variance, third and fourth central moments of the corrected alpha = 0.5 MLE"""
    if k < 1:
        raise DomainError(f"k must be positive, got {k!r}")
    return CentralMoments(
        variance=scale**2 * (0.5 / k + 1.125 / k**2),
        third=scale**3 * 1.25 / k**2,
        fourth=scale**4 * (0.75 / k**2 + 9.375 / k**3),
    )


def op_estimate(
    samples: np.ndarray, alpha: float, power: Optional[OptimalPower] = None
) -> EstimateReport:
    """Bias-corrected optimal power estimator"""
    if power is None:
        power = solve_optimal_lambda(alpha)
    if power.alpha != alpha:
        raise ConfigurationError(
            f"lambda* was solved for alpha={power.alpha!r}, not alpha={alpha!r}"
        )
    x = _as_matrix(samples)
    k = _require_k(x, 1)
    if power.lambda_star < 0.0 and np.any(x == 0.0):
        raise DomainError("a zero sample has no negative power")
    value = float(_op_kernel(x, power)[0])
    return EstimateReport(value, Method.OP, k, power.g_min, alpha)


def _check_method(method: Method, alpha: float) -> None:
    if alpha == 1.0:
        raise ConfigurationError("no estimator is defined at alpha = 1")
    if method is Method.HM and not alpha < 1.0:
        raise ConfigurationError(f"hm needs alpha < 1, got {alpha!r}")
    if method is Method.MLE05 and alpha != 0.5:
        raise ConfigurationError(f"mle05 needs alpha = 0.5, got {alpha!r}")


Estimator = Callable[..., EstimateReport]

ESTIMATORS: Dict[Method, Estimator] = {
    Method.GM: lambda x, alpha, beta, corrected: gm_estimate(x, alpha),
    Method.GM_BETA: lambda x, alpha, beta, corrected: gm_estimate_beta(x, alpha, beta),
    Method.HM: lambda x, alpha, beta, corrected: hm_estimate(x, alpha, corrected),
    Method.MLE05: lambda x, alpha, beta, corrected: mle05_estimate(x, corrected),
    Method.OP: lambda x, alpha, beta, corrected: op_estimate(x, alpha),
}


def estimate(
    samples: np.ndarray,
    method: Method,
    alpha: float,
    beta: float = 1.0,
    corrected: bool = True,
) -> EstimateReport:
    """Dispatch to the estimator named by `method`"""
    method = Method(method)
    _check_method(method, alpha)
    return ESTIMATORS[method](samples, alpha, beta, corrected)


def variance_factor(method: Method, alpha: float, k: int, beta: float = 1.0) -> float:
    """The V attached to `method`'s reports"""
    method = Method(method)
    _check_method(method, alpha)
    if method is Method.GM:
        return gm_variance_factor(alpha)
    if method is Method.GM_BETA:
        return gm_beta_variance(alpha, beta, k)
    if method is Method.HM:
        return hm_variance_factor(alpha)
    if method is Method.MLE05:
        return MLE05_VARIANCE
    return solve_optimal_lambda(alpha).g_min


def estimate_batch(
    samples: np.ndarray,
    method: Method,
    alpha: float,
    beta: float = 1.0,
    corrected: bool = True,
) -> np.ndarray:
    """One estimate per row of a (trials, k) sample matrix"""
    method = Method(method)
    _check_method(method, alpha)
    x = _as_matrix(samples)
    if method is Method.GM:
        k = _require_k(x, 2)
        return _gm_kernel(x, gm_log_denominator(alpha, k), alpha)
    if method is Method.GM_BETA:
        k = _require_k(x, 2)
        return _gm_kernel(x, gm_beta_log_denominator(alpha, beta, k), alpha)
    _require_k(x, 1)
    if method is Method.HM:
        _require_positive(x, "harmonic mean")
        return _hm_kernel(x, alpha, corrected)
    if method is Method.MLE05:
        _require_positive(x, "alpha = 0.5 MLE")
        return _mle05_kernel(x, corrected)
    power = solve_optimal_lambda(alpha)
    if power.lambda_star < 0.0 and np.any(x == 0.0):
        raise DomainError("a zero sample has no negative power")
    return _op_kernel(x, power)
