import logging
import math

import numpy as np
import pytest

from skewsketch.core import estimators
from skewsketch.core.bounds import symmetric_gm_reference_variance
from skewsketch.core.estimators import (
    estimate,
    estimate_batch,
    gm_beta_variance,
    gm_estimate,
    gm_estimate_beta,
    gm_variance_factor,
    hm_estimate,
    hm_variance_factor,
    mle05_central_moments,
    mle05_estimate,
    op_estimate,
    power_variance_factor,
    solve_optimal_lambda,
    variance_factor,
)
from skewsketch.core.interfaces.base import Method, OptimalPower
from skewsketch.core.schema.result import ConfigurationError, DomainError

LEVY_POWER = OptimalPower(alpha=0.5, lambda_star=-2.0, g_min=0.5)


def _z(values: np.ndarray, expected: float) -> float:
    return abs(values.mean() - expected) / (values.std(ddof=1) / math.sqrt(values.size))


def test_variance_factors_at_half():
    assert gm_variance_factor(0.5) == pytest.approx(math.pi**2 / 8.0)
    assert gm_variance_factor(0.5) == pytest.approx(1.2337, abs=1e-4)
    assert hm_variance_factor(0.5) == pytest.approx(math.pi / 2.0 - 1.0)
    assert hm_variance_factor(0.5) == pytest.approx(0.5708, abs=1e-4)


@pytest.mark.parametrize("delta, share", [(0.01, 0.03), (1e-3, 0.01)])
def test_gm_variance_vanishes_near_one(delta, share):
    # relative to the symmetric-projection constant the ratio is 4 delta / 3 below one
    # and 8 delta / 3 above
    for alpha in (1.0 - delta, 1.0 + delta):
        assert gm_variance_factor(alpha) < share * symmetric_gm_reference_variance(alpha)


def test_hm_variance_domain():
    with pytest.raises(DomainError):
        hm_variance_factor(1.2)


def test_gm_scale_equivariance(stable_draws):
    x = stable_draws(1.5, 20, seed=1)
    base = gm_estimate(x, 1.5).estimate
    assert gm_estimate(3.0 * x, 1.5).estimate == pytest.approx(3.0**1.5 * base, rel=1e-12)


def test_gm_report(stable_draws):
    report = gm_estimate(stable_draws(0.5, 30, seed=2), 0.5)
    assert report.method is Method.GM
    assert report.k == 30
    assert report.asymptotic_variance_factor == pytest.approx(math.pi**2 / 8.0)
    assert not report.degenerate
    assert report.standard_error == pytest.approx(
        report.estimate * math.sqrt(report.asymptotic_variance_factor / 30)
    )


def test_gm_zero_sample_is_degenerate():
    report = gm_estimate(np.array([1.0, 0.0, 2.0]), 1.5)
    assert report.estimate == 0.0
    assert report.degenerate


def test_gm_input_validation():
    with pytest.raises(DomainError):
        gm_estimate(np.array([1.0]), 0.5)
    with pytest.raises(DomainError):
        gm_estimate(np.array([1.0, np.inf]), 0.5)
    with pytest.raises(DomainError):
        gm_estimate(np.ones((2, 2, 2)), 0.5)


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_gm_beta_reduces_to_gm(stable_draws, alpha):
    x = stable_draws(alpha, 20, seed=3)
    assert gm_estimate_beta(x, alpha, 1.0).estimate == pytest.approx(
        gm_estimate(x, alpha).estimate, rel=1e-12
    )


def test_gm_beta_variance_decreases_in_beta():
    values = [gm_beta_variance(0.5, beta, 50) for beta in (0.0, 0.25, 0.5, 0.75, 1.0)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_gm_beta_variance_limits():
    assert gm_beta_variance(0.5, 1.0, 2) == math.inf
    assert gm_beta_variance(0.5, 1.0, 2000) == pytest.approx(gm_variance_factor(0.5), rel=1e-2)
    with pytest.raises(DomainError):
        gm_beta_variance(1.0, 1.0, 10)


def test_hm_all_ones():
    report = hm_estimate(np.ones(10), 0.5, corrected=False)
    assert report.estimate == pytest.approx(math.sqrt(2.0 / math.pi))
    assert report.estimate == pytest.approx(0.7979, abs=1e-4)
    corrected = hm_estimate(np.ones(10), 0.5)
    assert corrected.estimate == pytest.approx(
        report.estimate * (1.0 - hm_variance_factor(0.5) / 10)
    )


def test_hm_scale_equivariance(stable_draws):
    x = stable_draws(0.7, 25, seed=4)
    base = hm_estimate(x, 0.7).estimate
    assert hm_estimate(5.0 * x, 0.7).estimate == pytest.approx(5.0**0.7 * base, rel=1e-12)


def test_hm_domain():
    with pytest.raises(DomainError):
        hm_estimate(np.ones(4), 1.5)
    with pytest.raises(DomainError):
        hm_estimate(np.array([1.0, 0.0, 2.0]), 0.5)
    with pytest.raises(DomainError):
        hm_estimate(np.array([1.0, -1.0]), 0.5)


def test_mle05_all_ones():
    report = mle05_estimate(np.ones(4))
    assert report.estimate == pytest.approx(0.8125)
    assert report.asymptotic_variance_factor == 0.5
    assert mle05_estimate(np.ones(4), corrected=False).estimate == pytest.approx(1.0)


def test_mle05_scale_equivariance(stable_draws):
    x = stable_draws(0.5, 25, seed=5)
    base = mle05_estimate(x).estimate
    assert mle05_estimate(4.0 * x).estimate == pytest.approx(2.0 * base, rel=1e-12)


def test_mle05_domain():
    with pytest.raises(DomainError):
        mle05_estimate(np.array([1.0, 0.0]))


def test_mle05_central_moments():
    moments = mle05_central_moments(10)
    assert moments.variance == pytest.approx(0.05 + 0.01125)
    assert moments.third == pytest.approx(0.0125)
    assert moments.fourth == pytest.approx(0.0075 + 0.009375)
    assert mle05_central_moments(10, scale=2.0).variance == pytest.approx(4.0 * moments.variance)
    with pytest.raises(DomainError):
        mle05_central_moments(0)


def test_optimal_lambda_at_half():
    power = solve_optimal_lambda(0.5)
    assert power.lambda_star == pytest.approx(-2.0, abs=1e-6)
    assert power.g_min == pytest.approx(0.5, abs=1e-9)


@pytest.mark.parametrize("alpha", [round(0.1 * i, 1) for i in range(1, 10)])
def test_optimal_lambda_below_one(alpha):
    power = solve_optimal_lambda(alpha)
    assert power.lambda_star < 0.0
    assert power.g_min <= min(gm_variance_factor(alpha), hm_variance_factor(alpha)) + 1e-9


@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
def test_optimal_lambda_above_one(alpha):
    power = solve_optimal_lambda(alpha)
    lo, hi = -0.5 / alpha, 0.5
    assert lo < power.lambda_star < hi
    assert power.g_min <= gm_variance_factor(alpha) * (1.0 + 1e-6)


def test_optimal_lambda_special_cases():
    assert solve_optimal_lambda(2.0) == OptimalPower(2.0, 1.0, 2.0)
    with pytest.raises(DomainError):
        solve_optimal_lambda(1.0)


def test_power_variance_factor_limit():
    assert power_variance_factor(0.0, 0.5) == gm_variance_factor(0.5)
    assert power_variance_factor(1e-4, 1.5) == pytest.approx(gm_variance_factor(1.5), rel=1e-2)
    assert power_variance_factor(-2.0, 0.5) == pytest.approx(0.5, rel=1e-12)


def test_op_equals_mle05_at_half(stable_draws):
    for seed in range(100):
        x = stable_draws(0.5, 20, seed=seed)
        expected = mle05_estimate(x).estimate
        assert op_estimate(x, 0.5, LEVY_POWER).estimate == pytest.approx(expected, rel=1e-9)


def test_op_with_solved_power_at_half(stable_draws):
    x = stable_draws(0.5, 50, seed=7)
    assert op_estimate(x, 0.5).estimate == pytest.approx(mle05_estimate(x).estimate, rel=1e-5)


def test_op_scale_equivariance(stable_draws):
    x = stable_draws(1.5, 30, seed=8)
    base = op_estimate(x, 1.5).estimate
    assert op_estimate(2.0 * x, 1.5).estimate == pytest.approx(2.0**1.5 * base, rel=1e-10)


def test_op_at_two():
    x = np.array([1.0, -2.0, 3.0])
    assert op_estimate(x, 2.0).estimate == pytest.approx(14.0 / 6.0)


def test_op_validation():
    with pytest.raises(ConfigurationError):
        op_estimate(np.ones(3), 0.7, LEVY_POWER)
    with pytest.raises(DomainError):
        op_estimate(np.array([1.0, 0.0]), 0.5, LEVY_POWER)


def test_dispatch_rejects_mismatches():
    with pytest.raises(ConfigurationError):
        estimate(np.ones(4), Method.MLE05, 0.7)
    with pytest.raises(ConfigurationError):
        estimate(np.ones(4), Method.HM, 1.5)
    with pytest.raises(ConfigurationError):
        estimate(np.ones(4), Method.GM, 1.0)
    with pytest.raises(ValueError):
        estimate(np.ones(4), "median", 0.5)


def test_dispatch_by_name(stable_draws):
    x = stable_draws(0.5, 20, seed=9)
    assert estimate(x, "hm", 0.5).estimate == hm_estimate(x, 0.5).estimate
    assert estimate(x, Method.GM_BETA, 0.5, beta=1.0).method is Method.GM_BETA


@pytest.mark.parametrize("method", list(Method))
def test_batch_matches_single(stable_draws, method):
    x = stable_draws(0.5, (6, 15), seed=10)
    batch = estimate_batch(x, method, 0.5)
    assert batch.shape == (6,)
    for row, value in zip(x, batch):
        assert value == pytest.approx(estimate(row, method, 0.5).estimate, rel=1e-12)


def test_variance_factor_dispatch():
    assert variance_factor(Method.GM, 0.5, 10) == pytest.approx(math.pi**2 / 8.0)
    assert variance_factor(Method.HM, 0.5, 10) == pytest.approx(math.pi / 2.0 - 1.0)
    assert variance_factor(Method.MLE05, 0.5, 10) == 0.5
    assert variance_factor(Method.OP, 0.5, 10) == pytest.approx(0.5, abs=1e-9)
    assert variance_factor(Method.GM_BETA, 0.5, 10, beta=0.5) == gm_beta_variance(0.5, 0.5, 10)


def _variance_ladder(draws: np.ndarray, k: int):
    v = {}
    for method in (Method.GM, Method.HM, Method.MLE05, Method.OP):
        v[method] = k * float(np.var(estimate_batch(draws, method, 0.5), ddof=1))
    return v


def test_variance_ladder(stable_draws):
    k = 100
    v = _variance_ladder(stable_draws(0.5, (20_000, k), seed=12), k)
    assert v[Method.GM] == pytest.approx(1.2337, rel=0.08)
    assert v[Method.HM] == pytest.approx(0.5708, rel=0.08)
    assert v[Method.MLE05] == pytest.approx(0.5, rel=0.08)
    assert v[Method.OP] == pytest.approx(0.5, rel=0.08)
    assert v[Method.MLE05] < v[Method.HM] < v[Method.GM]


@pytest.mark.slow
def test_variance_ladder_full(stable_draws):
    k = 100
    v = _variance_ladder(stable_draws(0.5, (100_000, k), seed=13), k)
    assert v[Method.GM] == pytest.approx(1.2337, rel=0.05)
    assert v[Method.HM] == pytest.approx(0.5708, rel=0.05)
    assert v[Method.MLE05] == pytest.approx(0.5, rel=0.05)
    assert v[Method.OP] == pytest.approx(0.5, rel=0.05)
    assert v[Method.MLE05] < v[Method.HM] < v[Method.GM]


@pytest.mark.parametrize("alpha", [0.3, 0.75, 1.5])
@pytest.mark.parametrize("k", [5, 10, 50])
def test_gm_is_unbiased(stable_draws, alpha, k):
    values = estimate_batch(stable_draws(alpha, (20_000, k), seed=14), Method.GM, alpha)
    assert _z(values, 1.0) < 4.0


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.3, 0.75, 1.5])
@pytest.mark.parametrize("k", [5, 10, 50])
def test_gm_is_unbiased_full(stable_draws, alpha, k):
    values = estimate_batch(stable_draws(alpha, (100_000, k), seed=15), Method.GM, alpha)
    assert _z(values, 1.0) < 3.0


def test_gm_beta_is_unbiased(stable_draws):
    draws = stable_draws(0.5, (20_000, 10), seed=16, beta=0.5)
    values = estimate_batch(draws, Method.GM_BETA, 0.5, beta=0.5)
    assert _z(values, 1.0) < 4.0


def test_gm_beta_variance_matches_simulation(stable_draws):
    k = 50
    draws = stable_draws(0.5, (20_000, k), seed=17, beta=0.5)
    values = estimate_batch(draws, Method.GM_BETA, 0.5, beta=0.5)
    assert k * float(np.var(values, ddof=1)) == pytest.approx(
        gm_beta_variance(0.5, 0.5, k), rel=0.08
    )


@pytest.mark.slow
def test_op_variance_at_three_quarters(stable_draws):
    k = 100
    values = estimate_batch(stable_draws(0.75, (100_000, k), seed=18), Method.OP, 0.75)
    expected = estimators.solve_optimal_lambda(0.75).g_min
    assert k * float(np.var(values, ddof=1)) == pytest.approx(expected, rel=0.1)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8, 0.95])
def test_power_variance_factor_is_convex_below_one(alpha):
    lams = np.linspace(-5.0, 0.4, 109)
    step = float(lams[1] - lams[0])
    g = np.array([power_variance_factor(float(lam), alpha) for lam in lams])
    second = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / step**2
    assert np.all(second >= -1e-8 * np.maximum(1.0, g[1:-1]))


def test_optimal_lambda_reports_the_cap(caplog):
    estimators.solve_optimal_lambda.cache_clear()
    with caplog.at_level(logging.WARNING, logger=estimators.__name__):
        solve_optimal_lambda(0.5)
        assert "search edge" not in caplog.text
        power = solve_optimal_lambda(0.995)
    assert power.lambda_star == pytest.approx(
        -estimators.LAMBDA_CAP, abs=estimators.LAMBDA_CAP_MARGIN
    )
    assert "search edge" in caplog.text


def _mean_error(stable_draws, method, k, trials, seed, corrected=True, chunk=50_000):
    means = []
    for i, start in enumerate(range(0, trials, chunk)):
        draws = stable_draws(0.5, (min(chunk, trials - start), k), seed=seed + i)
        means.append(np.mean(estimate_batch(draws, method, 0.5, corrected=corrected)))
    return float(np.mean(means)) - 1.0


@pytest.mark.parametrize("method", [Method.HM, Method.MLE05, Method.OP])
def test_corrected_bias_is_second_order(stable_draws, method):
    k = 20
    assert abs(_mean_error(stable_draws, method, k, 200_000, seed=19)) <= 5.0 / k**2


def test_uncorrected_mle05_bias_is_first_order(stable_draws):
    k = 20
    error = _mean_error(stable_draws, Method.MLE05, k, 200_000, seed=19, corrected=False)
    assert error > 5.0 / k**2


@pytest.mark.slow
@pytest.mark.parametrize("method", [Method.HM, Method.MLE05, Method.OP])
def test_corrected_bias_is_second_order_full(stable_draws, method):
    k = 100
    assert abs(_mean_error(stable_draws, method, k, 1_000_000, seed=20)) <= 5.0 / k**2


BETAS = (0.0, 0.25, 0.5, 0.75, 1.0)


def _beta_variances(stable_draws, trials, seed, k=50):
    out = []
    for i, beta in enumerate(BETAS):
        draws = stable_draws(0.5, (trials, k), seed=seed + i, beta=beta)
        values = estimate_batch(draws, Method.GM_BETA, 0.5, beta=beta)
        squares = (values - values.mean()) ** 2
        out.append((float(np.var(values, ddof=1)), float(np.std(squares) / math.sqrt(trials))))
    return out


def _assert_decreasing_in_beta(variances):
    for (a, se_a), (b, se_b) in zip(variances, variances[1:]):
        assert b - a < 3.0 * math.hypot(se_a, se_b)
    (first, se_first), (last, se_last) = variances[0], variances[-1]
    assert first - last > 3.0 * math.hypot(se_first, se_last)


def test_gm_beta_simulated_variance_decreases_in_beta(stable_draws):
    _assert_decreasing_in_beta(_beta_variances(stable_draws, 20_000, seed=21))


@pytest.mark.slow
def test_gm_beta_simulated_variance_decreases_in_beta_full(stable_draws):
    _assert_decreasing_in_beta(_beta_variances(stable_draws, 100_000, seed=22))
