"""
Special functions and one-dimensional solvers.

Gamma uses the g=7, n=9 Lanczos approximation with reflection below 1/2;
digamma shifts its argument above 10 and applies the asymptotic series.
Both are plain float functions with no external math dependency.
"""
from dataclasses import dataclass
from typing import Callable, Tuple
import logging
import math

from .schema.result import BracketError, DomainError, NumericError

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.57721566490153286061

ROOT_TOL = 1e-12
MINIMIZE_TOL = 1e-10
MAX_ROOT_ITERATIONS = 500
MAX_MINIMIZE_ITERATIONS = 500

_LANCZOS_G = 7.0
_LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2n / (2n) for the digamma asymptotic series
_DIGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def _is_pole(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def sinpi(x: float) -> float:
    """sin(pi * x) with exact argument reduction"""
    r = math.fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    # sin(pi r) = sin(pi (1 - r)) keeps the argument within [-1/2, 1/2]
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def _lanczos_sum(z: float) -> float:
    total = _LANCZOS_COEFFICIENTS[0]
    for i in range(1, len(_LANCZOS_COEFFICIENTS)):
        total += _LANCZOS_COEFFICIENTS[i] / (z + i)
    return total


def gamma_fn(x: float) -> float:
    """Gamma function on the real line, poles excluded"""
    if math.isnan(x):
        raise NumericError("gamma of NaN")
    if _is_pole(x):
        raise DomainError(f"gamma has a pole at {x!r}")
    if x < 0.5:
        s = sinpi(x)
        return math.pi / (s * gamma_fn(1.0 - x))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    half = math.pow(t, 0.5 * (z + 0.5))
    return _SQRT_2PI * half * math.exp(-t) * half * _lanczos_sum(z)


def log_gamma(x: float) -> float:
    """log |Gamma(x)|, usable far beyond the range where Gamma overflows"""
    if math.isnan(x):
        raise NumericError("log_gamma of NaN")
    if _is_pole(x):
        raise DomainError(f"gamma has a pole at {x!r}")
    if x < 0.5:
        return math.log(math.pi / abs(sinpi(x))) - log_gamma(1.0 - x)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def digamma(x: float) -> float:
    """psi(x) = Gamma'(x) / Gamma(x)"""
    if math.isnan(x):
        raise NumericError("digamma of NaN")
    if _is_pole(x):
        raise DomainError(f"digamma has a pole at {x!r}")
    if x < 0.0:
        # psi(1 - x) - psi(x) = pi cot(pi x)
        return digamma(1.0 - x) - math.pi * _cospi(x) / sinpi(x)
    shift = []
    while x < 10.0:
        shift.append(1.0 / x)
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for c in _DIGAMMA_SERIES:
        series += c * power
        power *= inv2
    return math.fsum([math.log(x), -0.5 / x, -series] + [-s for s in shift])


def _cospi(x: float) -> float:
    return sinpi(x + 0.5)


@dataclass(frozen=True)
class RootBracket:
    """Closed interval [lo, hi] with an absolute x-tolerance"""

    lo: float
    hi: float
    tol: float = ROOT_TOL

    def __post_init__(self) -> None:
        if not (self.lo < self.hi):
            raise DomainError(f"bracket needs lo < hi, got [{self.lo!r}, {self.hi!r}]")
        if not (self.tol > 0.0):
            raise DomainError(f"bracket tolerance must be positive, got {self.tol!r}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def shrunk(self, margin: float = 1e-9) -> "RootBracket":
        """Move both ends inward, away from poles sitting on the ends"""
        return RootBracket(self.lo + margin, self.hi - margin, self.tol)


def _checked(f: Callable[[float], float], x: float) -> float:
    value = f(x)
    if not math.isfinite(value):
        raise NumericError(f"non-finite function value {value!r} at x={x!r}")
    return value


def find_root(f: Callable[[float], float], bracket: RootBracket) -> float:
    """
    Root of a continuous f with a sign change over `bracket`.

    Bisection guarantees progress; secant steps are taken whenever they land
    strictly inside the current bracket and the previous step halved it.
    Returns the evaluated point with the smallest |f| once the bracket is
    narrower than bracket.tol.
    """
    lo, hi = bracket.lo, bracket.hi
    f_lo, f_hi = _checked(f, lo), _checked(f, hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise BracketError(lo, hi, f_lo, f_hi)

    best_x, best_f = (lo, f_lo) if abs(f_lo) < abs(f_hi) else (hi, f_hi)
    last_width = bracket.width
    for iteration in range(MAX_ROOT_ITERATIONS):
        width = hi - lo
        if width <= bracket.tol:
            break
        x = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        if not (lo < x < hi) or width > 0.5 * last_width:
            x = lo + 0.5 * width
            if not lo < x < hi:
                # adjacent floats
                break
        last_width = width
        fx = _checked(f, x)
        if abs(fx) < abs(best_f):
            best_x, best_f = x, fx
        if fx == 0.0:
            break
        if (fx > 0.0) == (f_lo > 0.0):
            lo, f_lo = x, fx
        else:
            hi, f_hi = x, fx
    else:
        logger.debug("find_root stopped after %d iterations", MAX_ROOT_ITERATIONS)
    return best_x


def minimize_1d(
    f: Callable[[float], float], lo: float, hi: float, tol: float = MINIMIZE_TOL
) -> Tuple[float, float]:
    """
    Brent's minimizer: golden-section steps with parabolic interpolation.

    Assumes f is unimodal on [lo, hi]; returns (argmin, min).
    """
    if not lo < hi:
        raise DomainError(f"minimize_1d needs lo < hi, got [{lo!r}, {hi!r}]")
    golden = 0.5 * (3.0 - math.sqrt(5.0))
    sqrt_eps = math.sqrt(2.2e-16)

    a, b = lo, hi
    x = w = v = a + golden * (b - a)
    fx = fw = fv = _checked(f, x)
    d = e = 0.0
    for _ in range(MAX_MINIMIZE_ITERATIONS):
        m = 0.5 * (a + b)
        tol1 = sqrt_eps * abs(x) + tol / 3.0
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            break
        parabolic = False
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            if abs(p) < abs(0.5 * q * e) and q * (a - x) < p < q * (b - x):
                e, d = d, p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if x < m else -tol1
                parabolic = True
        if not parabolic:
            e = (b - x) if x < m else (a - x)
            d = golden * e
        u = x + d if abs(d) >= tol1 else x + (tol1 if d > 0 else -tol1)
        fu = _checked(f, u)
        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx
