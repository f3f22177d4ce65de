import math

import numpy as np
import pytest
from scipy import special

from skewsketch.core.estimators import power_variance_factor
from skewsketch.core.numerics import (
    EULER_GAMMA,
    RootBracket,
    digamma,
    find_root,
    gamma_fn,
    log_gamma,
    minimize_1d,
    sinpi,
)
from skewsketch.core.schema.result import BracketError, DomainError, NumericError

SQRT_PI = math.sqrt(math.pi)


@pytest.mark.parametrize(
    "x, expected",
    [
        (5.0, 24.0),
        (0.5, SQRT_PI),
        (1.5, SQRT_PI / 2.0),
        (-0.5, -2.0 * SQRT_PI),
        (10.0, 362880.0),
    ],
)
def test_gamma_known_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-11)


@pytest.mark.parametrize("x", [0.0, -1.0, -3.0])
def test_gamma_poles(x):
    with pytest.raises(DomainError):
        gamma_fn(x)
    with pytest.raises(DomainError):
        log_gamma(x)
    with pytest.raises(DomainError):
        digamma(x)


@pytest.mark.parametrize("x", [0.1, 0.7, 3.3, 25.0, 170.5, 1.0e4, -2.5, -0.3])
def test_log_gamma_matches_lgamma(x):
    assert log_gamma(x) == pytest.approx(math.lgamma(x), rel=1e-10, abs=1e-12)


def test_gamma_nan():
    with pytest.raises(NumericError):
        gamma_fn(float("nan"))


@pytest.mark.parametrize(
    "x, expected",
    [
        (1.0, -EULER_GAMMA),
        (2.0, 1.0 - EULER_GAMMA),
        (0.5, -EULER_GAMMA - 2.0 * math.log(2.0)),
    ],
)
def test_digamma_known_values(x, expected):
    assert digamma(x) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("x", [0.01, 0.3, 2.5, 9.9, 10.0, 55.5, -0.5, -1.3])
def test_digamma_matches_scipy(x):
    assert digamma(x) == pytest.approx(float(special.digamma(x)), rel=1e-11, abs=1e-11)


def _off_poles(values: np.ndarray, margin: float = 1e-3) -> np.ndarray:
    return values[np.abs(values - np.round(values)) > margin]


def test_gamma_recurrence():
    for x in _off_poles(np.random.default_rng(1).uniform(-20.0, 30.0, 1000)).tolist():
        assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-11), x


def test_gamma_reflection():
    for x in _off_poles(np.random.default_rng(2).uniform(-5.5, 5.5, 500)).tolist():
        expected = math.pi / math.sin(math.pi * x)
        assert gamma_fn(x) * gamma_fn(1.0 - x) == pytest.approx(expected, rel=1e-10), x


def test_digamma_recurrence():
    xs = np.concatenate(
        [np.random.default_rng(3).uniform(0.05, 60.0, 500), _off_poles(np.linspace(-6.3, -0.1, 50))]
    )
    for x in xs.tolist():
        assert digamma(x + 1.0) - digamma(x) == pytest.approx(1.0 / x, rel=1e-10, abs=1e-12), x


def test_sinpi_is_exact_at_integers():
    assert sinpi(1.0) == 0.0
    assert sinpi(2.0) == 0.0
    assert sinpi(-4.0) == 0.0
    assert sinpi(0.5) == 1.0
    assert sinpi(-3.5) == 1.0


def test_find_root_sqrt2():
    root = find_root(lambda x: x * x - 2.0, RootBracket(1.0, 2.0, tol=1e-12))
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_find_root_identity():
    assert find_root(lambda x: x, RootBracket(-1.0, 1.0)) == pytest.approx(0.0, abs=1e-12)


def test_find_root_is_deterministic():
    def f(x):
        return math.cos(x) - x

    bracket = RootBracket(0.0, 1.0, tol=1e-14)
    assert find_root(f, bracket) == find_root(f, bracket)


def test_find_root_root_at_end():
    assert find_root(lambda x: x - 1.0, RootBracket(0.0, 1.0)) == 1.0


def test_find_root_without_sign_change():
    with pytest.raises(BracketError) as info:
        find_root(lambda x: x * x + 1.0, RootBracket(-1.0, 1.0))
    assert info.value.lo == -1.0
    assert info.value.hi == 1.0


def test_find_root_non_finite():
    with pytest.raises(NumericError):
        find_root(lambda x: float("nan"), RootBracket(0.0, 1.0))


def test_root_bracket_validation():
    with pytest.raises(DomainError):
        RootBracket(1.0, 1.0)
    with pytest.raises(DomainError):
        RootBracket(0.0, 1.0, tol=0.0)
    shrunk = RootBracket(0.0, 1.0).shrunk(0.1)
    assert (shrunk.lo, shrunk.hi) == pytest.approx((0.1, 0.9))
    assert shrunk.width == pytest.approx(0.8)


def test_minimize_quadratic():
    x, fx = minimize_1d(lambda v: (v - 3.0) ** 2, 0.0, 10.0)
    assert x == pytest.approx(3.0, abs=1e-6)
    assert fx == pytest.approx(0.0, abs=1e-10)


def test_minimize_vertex():
    x, _ = minimize_1d(abs, -1.0, 2.0)
    assert x == pytest.approx(0.0, abs=1e-6)


def test_minimize_power_variance_at_half():
    x, fx = minimize_1d(lambda lam: power_variance_factor(lam, 0.5), -6.0, 0.49)
    assert x == pytest.approx(-2.0, abs=1e-6)
    assert fx == pytest.approx(0.5, abs=1e-9)


def test_minimize_needs_interval():
    with pytest.raises(DomainError):
        minimize_1d(abs, 1.0, 1.0)


def test_minimize_non_finite():
    with pytest.raises(NumericError):
        minimize_1d(lambda v: math.inf, 0.0, 1.0)
