"""
Skewed stable laws S(alpha, beta, F): sampling and absolute moments.

The characteristic function is exp(-F |t|^alpha (1 - i beta sgn(t) tan(pi alpha / 2))),
so beta = 1 with alpha < 1 is supported on the non-negative reals.
"""
from typing import Union
import logging
import math

import numpy as np

from .interfaces.base import StableParams
from .numerics import EULER_GAMMA, digamma, gamma_fn, log_gamma, sinpi
from .schema.result import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# |lambda| below this uses the lambda -> 0 limit of the derivative
_SMALL_LAMBDA = 1e-6


def kappa(alpha: float) -> float:
    """alpha for alpha < 1, 2 - alpha for alpha > 1"""
    if alpha == 1.0:
        raise DomainError("kappa is undefined at alpha = 1")
    if not 0.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (0, 2], got {alpha!r}")
    return alpha if alpha < 1.0 else 2.0 - alpha


def _zeta(alpha: float, beta: float) -> float:
    # tan(pi) is not exactly zero in floating point
    if alpha == 2.0:
        return 0.0
    return beta * math.tan(0.5 * math.pi * alpha)


def sample(params: StableParams, u: ArrayLike, w: ArrayLike) -> ArrayLike:
    """
    Chambers-Mallows-Stuck transform of u in (-pi/2, pi/2) and w > 0.

    With u uniform and w unit exponential the result is distributed as
    S(alpha, beta, F). Scalars give a float; arrays are transformed
    element-wise.
    """
    alpha = params.alpha
    if alpha == 1.0:
        raise DomainError("sampling at alpha = 1 is not supported")
    u_arr = np.asarray(u, dtype=np.float64)
    w_arr = np.asarray(w, dtype=np.float64)
    if not np.all(w_arr > 0.0):
        raise DomainError("the exponential input w must be positive")

    zeta = _zeta(alpha, params.beta)
    theta0 = math.atan(zeta) / alpha
    factor = params.scale ** (1.0 / alpha) * (1.0 + zeta * zeta) ** (0.5 / alpha)
    shifted = alpha * (u_arr + theta0)
    z = (
        factor
        * np.sin(shifted)
        / np.cos(u_arr) ** (1.0 / alpha)
        * (np.cos(u_arr - shifted) / w_arr) ** ((1.0 - alpha) / alpha)
    )
    if z.ndim == 0:
        return float(z)
    return z


def _sin_gamma(lam: float) -> float:
    """(2/pi) sin(pi lambda / 2) Gamma(lambda), equal to 1 at lambda = 0"""
    if lam == 0.0:
        return 1.0
    return 2.0 / math.pi * sinpi(0.5 * lam) * gamma_fn(lam)


def general_abs_moment(alpha: float, beta: float, lam: float) -> float:
    """E|Z|^lambda for Z ~ S(alpha, beta, 1), -1 < lambda < alpha"""
    if lam == 0.0:
        return 1.0
    _check_general(alpha, lam)
    zeta = _zeta(alpha, beta)
    ratio = lam / alpha
    return (
        math.cos(ratio * math.atan(zeta))
        * (1.0 + zeta * zeta) ** (0.5 * ratio)
        * _sin_gamma(lam)
        * gamma_fn(1.0 - ratio)
    )


def skewed_abs_moment(alpha: float, lam: float) -> float:
    """E|Z|^lambda for Z ~ S(alpha, 1, 1), -1 < lambda < alpha, written with kappa"""
    if lam == 0.0:
        return 1.0
    _check_general(alpha, lam)
    k = kappa(alpha)
    ratio = lam / alpha
    return (
        math.cos(0.5 * math.pi * k * ratio)
        / math.cos(0.5 * math.pi * k) ** ratio
        * _sin_gamma(lam)
        * gamma_fn(1.0 - ratio)
    )


def positive_moment(alpha: float, lam: float) -> float:
    """E Z^lambda for Z ~ S(alpha, 1, 1) with alpha < 1, any lambda < alpha"""
    return math.exp(_log_positive_moment(alpha, lam))


def _check_general(alpha: float, lam: float) -> None:
    if alpha == 1.0:
        raise DomainError("moments at alpha = 1 are not supported")
    if lam >= alpha:
        raise DomainError(f"E|Z|^lambda is infinite for lambda={lam!r} >= alpha={alpha!r}")
    if lam <= -1.0:
        raise DomainError(f"E|Z|^lambda is infinite for lambda={lam!r} <= -1")


def _log_positive_moment(alpha: float, lam: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"the positive-support form needs alpha < 1, got {alpha!r}")
    if lam >= alpha:
        raise DomainError(f"E|Z|^lambda is infinite for lambda={lam!r} >= alpha={alpha!r}")
    if lam == 0.0:
        return 0.0
    ratio = lam / alpha
    return (
        log_gamma(1.0 - ratio)
        - ratio * math.log(math.cos(0.5 * math.pi * alpha))
        - log_gamma(1.0 - lam)
    )


def abs_moment(params: StableParams, lam: float) -> float:
    """
    E|Z|^lambda for Z ~ S(alpha, beta, F).

    Fully skewed laws with alpha < 1 admit every lambda < alpha; all other
    laws need -1 < lambda < alpha.
    """
    if lam == 0.0:
        return 1.0
    alpha, beta = params.alpha, params.beta
    if alpha < 1.0 and params.fully_skewed:
        unit = positive_moment(alpha, lam)
    elif params.fully_skewed:
        unit = skewed_abs_moment(alpha, lam)
    else:
        unit = general_abs_moment(alpha, beta, lam)
    return params.scale ** (lam / alpha) * unit


def log_abs_moment(alpha: float, lam: float) -> float:
    """log E|Z|^lambda for Z ~ S(alpha, 1, 1)"""
    if alpha < 1.0:
        return _log_positive_moment(alpha, lam)
    if lam == 0.0:
        return 0.0
    _check_general(alpha, lam)
    k = kappa(alpha)
    ratio = lam / alpha
    return (
        math.log(math.cos(0.5 * math.pi * k * ratio))
        - ratio * math.log(math.cos(0.5 * math.pi * k))
        + math.log(2.0 / math.pi * abs(sinpi(0.5 * lam)))
        + log_gamma(lam)
        + log_gamma(1.0 - ratio)
    )


def dlog_abs_moment(alpha: float, lam: float) -> float:
    """d/dlambda of log_abs_moment"""
    if alpha < 1.0:
        if lam >= alpha:
            raise DomainError(f"lambda={lam!r} must be below alpha={alpha!r}")
        return (
            -digamma(1.0 - lam / alpha) / alpha
            - math.log(math.cos(0.5 * math.pi * alpha)) / alpha
            + digamma(1.0 - lam)
        )
    _check_general(alpha, lam)
    k = kappa(alpha)
    c = 0.5 * math.pi * k / alpha
    log_cos = math.log(math.cos(0.5 * math.pi * k))
    if abs(lam) < _SMALL_LAMBDA:
        # cot and digamma poles at zero cancel, leaving -gamma_e
        return -EULER_GAMMA * (1.0 - 1.0 / alpha) - log_cos / alpha
    return (
        -c * math.tan(c * lam)
        - log_cos / alpha
        + 0.5 * math.pi / math.tan(0.5 * math.pi * lam)
        - digamma(1.0 - lam / alpha) / alpha
        + digamma(lam)
    )


def levy_pdf(z: float, scale: float = 1.0) -> float:
    """Density of S(1/2, 1, scale), the Levy law"""
    if not z > 0.0:
        raise DomainError(f"the Levy density needs z > 0, got {z!r}")
    if not scale > 0.0:
        raise DomainError(f"scale must be positive, got {scale!r}")
    return (
        scale
        / math.sqrt(2.0 * math.pi)
        * math.exp(-scale * scale / (2.0 * z))
        / z**1.5
    )
