
import numpy as np
import pytest

from ovstat import parent
from ovstat.curve import Curve
from ovstat.reconstruct import (
    ReconstructionError,
    from_adjacent_regression,
    from_max_regression,
    from_min_regression,
    from_single_regression_slope,
    midsample_mixing_weight,
    midsample_quantile_density,
    quantile_from_linear_regression,
)
from ovstat.regression import mean_adjacent, mean_min_extended


def test_min_route_uniform_example():
    n, m = 4, 2
    d = n - m
    x = np.linspace(0.01, 0.99, 201)
    g = (1 - (1 - x) ** (d + 1)) / (d + 1)
    res = from_min_regression(Curve(x, g), n, m, derivative=(1 - x) ** d)
    assert res.max_abs_error_against(lambda t: t) < 1e-12
    assert res.diagnostics["monotone"]


def test_min_route_exponential_example():
    n, m = 3, 2
    d = n - m
    x = np.linspace(0.01, 6.0, 400)
    res = from_min_regression(
        Curve(x, (1 - np.exp(-d * x)) / d), n, m, derivative=np.exp(-d * x)
    )
    assert res.max_abs_error_against(lambda t: 1 - np.exp(-t)) < 1e-12


def test_min_route_finite_differences():
    # without an exact derivative the slope comes from central differences
    n, m = 2, 1
    u = np.arange(1, 2001) / 2001.0
    x = -np.log1p(-u)  # exponential quantiles
    g = (1 - np.exp(-x)) / 1.0
    res = from_min_regression(Curve(x, g), n, m)
    keep = (u >= 0.01) & (u <= 0.99)
    err = np.abs(res.cdf.values - (1 - np.exp(-x)))[keep].max()
    assert err < 1e-4


def test_min_route_rejects_bad_slopes():
    x = np.linspace(0.01, 0.99, 50)
    with pytest.raises(ReconstructionError):
        from_min_regression(Curve(x, x), 3, 2, derivative=np.full_like(x, 1.0))  # degenerate
    with pytest.raises(ReconstructionError):
        from_min_regression(Curve(x, x**2), 3, 2, derivative=2 * x)  # increasing slope
    with pytest.raises(ReconstructionError):
        from_min_regression(Curve(x, 2 * x), 3, 2, derivative=np.full_like(x, 2.0))  # > 1


def test_max_route_uniform_example():
    n, m = 5, 3
    d = n - m
    x = np.linspace(0.01, 0.99, 201)
    g = (x ** (d + 1) + d) / (d + 1)
    res = from_max_regression(Curve(x, g), n, m, derivative=x**d)
    assert res.max_abs_error_against(lambda t: t) < 1e-12


def test_max_route_is_negation_dual_of_min_route():
    n, m = 4, 2
    d = n - m
    x = np.linspace(0.01, 0.99, 101)
    gp = x**d
    res_max = from_max_regression(Curve(x, (x ** (d + 1) + d) / (d + 1)), n, m, derivative=gp)
    # reflect: a max-regression for X is a min-regression for -X
    xr = -x[::-1]
    res_min = from_min_regression(
        Curve(xr, -((x ** (d + 1) + d) / (d + 1))[::-1]), n, m, derivative=gp[::-1]
    )
    assert np.allclose(res_min.cdf.values, (1 - res_max.cdf.values)[::-1], atol=1e-12)


def test_adjacent_route_power_example():
    alpha, i = 2.0, 2
    x = np.linspace(0.02, 0.99, 120)
    res = from_adjacent_regression(
        lambda t: t ** (alpha + 1) / (i * alpha + 1), i, upper=1.0, grid=x
    )
    assert res.max_abs_error_against(lambda t: t**alpha) < 1e-12


def test_adjacent_route_constant_gap_linear_regression():
    # a constant gap characterises the reciprocal-linear cdf 1/(1 + A(b-x))
    A, b, i = 0.8, 0.0, 3
    x = np.linspace(-25.0, -0.05, 200)
    res = from_adjacent_regression(lambda t: 1.0 / (A * (i - 1)) + 0.0 * t, i, upper=b, grid=x)
    assert res.max_abs_error_against(lambda t: 1.0 / (1.0 + A * (b - t))) < 1e-10


def test_adjacent_route_negative_exponential_example():
    lam, i = 1.3, 2
    x = np.linspace(-14.0, -0.02, 200)
    res = from_adjacent_regression(lambda t: np.exp(lam * t) / (i * lam), i, upper=0.0, grid=x)
    assert res.max_abs_error_against(lambda t: np.exp(lam * t)) < 1e-10


def test_adjacent_route_validation():
    with pytest.raises(ValueError):
        from_adjacent_regression(lambda t: 1.0, 1, upper=1.0, grid=np.linspace(0.1, 0.9, 5))
    with pytest.raises(ReconstructionError):
        from_adjacent_regression(
            lambda t: t - 0.5, 2, upper=1.0, grid=np.linspace(0.1, 0.9, 5)
        )
    with pytest.raises(ValueError):
        from_adjacent_regression(lambda t: 1.0, 2, upper=1.0)  # callable needs a grid


def test_adjacent_route_from_tabulated_curve():
    alpha, i = 2.0, 3
    model = parent.power_law(alpha)
    u = np.arange(1, 2002) / 2002.0
    x = np.asarray(model.quantile(u), dtype=float)
    gap = x - np.array([mean_adjacent(model, i, 5, float(t)) for t in x])
    res = from_adjacent_regression(Curve(x, gap), i, upper=1.0)
    keep = (u >= 0.01) & (u <= 0.99)
    err = np.abs(res.cdf.values - x**alpha)[keep].max()
    assert err < 1e-5


def test_single_slope_logistic_example():
    x = np.linspace(-9.0, 9.0, 301)
    slope = 2 * np.exp(x) / (1 + np.exp(x)) ** 2
    res = from_single_regression_slope(Curve(x, slope), 2, 3)
    assert res.max_abs_error_against(lambda t: 1 / (1 + np.exp(-t))) < 1e-8
    # the branch switch happens no earlier than the kernel argmax
    switch = res.diagnostics["branch_switch_index"]
    assert res.cdf.values[switch] >= (2 - 1) / (3 - 1) - 1e-9


def test_single_slope_extreme_indices_match_extreme_routes():
    # j = 1 reduces to the min-regression inversion
    x = np.linspace(0.05, 4.0, 200)
    F = 1 - np.exp(-x)
    n = 3
    slope = (1 - F) ** (n - 1)
    res = from_single_regression_slope(Curve(x, slope), 1, n)
    assert np.allclose(res.cdf.values, F, atol=1e-12)
    res_min = from_min_regression(
        Curve(x, np.zeros_like(x)), n, 1, derivative=slope
    )
    assert np.allclose(res.cdf.values, res_min.cdf.values, atol=1e-12)
    # j = n reduces to the max-regression inversion
    res_n = from_single_regression_slope(Curve(x, F ** (n - 1)), n, n)
    assert np.allclose(res_n.cdf.values, F, atol=1e-12)


def test_single_slope_rejects_flat_or_oversized():
    x = np.linspace(0.1, 0.9, 20)
    with pytest.raises(ReconstructionError):
        from_single_regression_slope(Curve(x, np.zeros_like(x)), 2, 3)
    with pytest.raises(ReconstructionError):
        from_single_regression_slope(Curve(x, np.full_like(x, 0.9)), 2, 3)  # above kernel max
    # a slope profile no monotone cdf can produce: high-low-high
    bad = np.where((x > 0.3) & (x < 0.6), 0.05, 0.45)
    with pytest.raises(ReconstructionError):
        from_single_regression_slope(Curve(x, bad), 2, 3)


def test_midsample_quantile_density_closed_forms():
    u = np.linspace(0.05, 0.95, 19)
    q = midsample_quantile_density(2, 4)
    assert midsample_mixing_weight(2, 4) == pytest.approx(0.25)
    assert np.allclose(q(u), (1 + u) / (u**1.25 * (1 - u) ** 2.5))
    q = midsample_quantile_density(3, 4)
    assert midsample_mixing_weight(3, 4) == pytest.approx(0.75)
    assert np.allclose(q(u), (2 - u) / (u**2.5 * (1 - u) ** 1.25))
    # the symmetric family: j = i+1, n = 2i+1 has constant numerator
    for i in [1, 2, 3]:
        q = midsample_quantile_density(i + 1, 2 * i + 1)
        ratio = q(u) / (u ** -(1 + i / 2) * (1 - u) ** -(1 + i / 2))
        assert np.allclose(ratio, ratio[0])
    with pytest.raises(ValueError):
        midsample_quantile_density(1, 4)


def test_round_trips_forward_then_inverse():
    # tabulate the forward regression, reconstruct, compare on the central
    # 98% quantile range
    cases = [
        (parent.uniform(), 3, 1),
        (parent.exponential(), 2, 1),
        (parent.logistic(), 2, 1),
        (parent.power_law(2.0), 3, 2),
    ]
    u = np.arange(1, 2001) / 2001.0
    keep = (u >= 0.01) & (u <= 0.99)
    for model, n, m in cases:
        x = np.asarray(model.quantile(u), dtype=float)
        g = np.array([mean_min_extended(model, n, m, float(t)) for t in x])
        res = from_min_regression(Curve(x, g), n, m)
        err = np.abs(res.cdf.values - np.asarray(model.cdf(x)))[keep].max()
        assert err < 1e-5, (model.name, err)


def test_wg_quantile_specialisations():
    u = np.linspace(0.05, 0.95, 19)
    # slope parameter 1: the quantile density is of complementary-beta form
    for j, n in [(2, 4), (3, 5)]:
        lam = (j - 1) / (n - 1)
        Q, qd = quantile_from_linear_regression(lam, 1.0, -1.0)
        target = u ** -(1 + (n - j) / (n - 1)) * (1 - u) ** -(1 + (j - 1) / (n - 1))
        ratio = qd(u) / target
        assert np.allclose(ratio, ratio[0])
        assert ratio[0] > 0  # increasing quantile needs the right sign of c
    # lam = 1/2 with reduced slope 1/2 gives the linear (uniform) quantile
    Q, _ = quantile_from_linear_regression(0.5, 0.5, -2.0)
    assert np.allclose(Q(u), 2 * u - 1)
    with pytest.raises(ValueError):
        quantile_from_linear_regression(0.5, 0.0, 1.0)


def test_degenerate_linear_quantile_rejected_downstream():
    Q, qd = quantile_from_linear_regression(0.5, 0.5, 0.0)
    assert Q(0.3) == 0.0
    with pytest.raises(ValueError):
        parent.from_quantile_density(qd)
