import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ebci.kernels import density_kernel
from ebci.lpreg import Sample
from ebci.simharness import replication_rng
from ebci.variance import (
    VarianceProxy,
    pilot_bandwidths,
    variance_proxy_density,
    variance_proxy_regression,
    variance_proxy_regression_simple,
)

K1 = density_kernel("epanechnikov", 1)


def _uniform_sample(seed, n, noise=1.0):
    rng = replication_rng(seed, 0)
    xs = rng.uniform(-1, 1, n)
    return Sample(xs, np.sin(xs) + noise * rng.standard_normal(n))


def test_pilot_bandwidths():
    g, b = pilot_bandwidths(1000, 3)
    assert g == pytest.approx(1000 ** (-1 / 7))
    assert b == pytest.approx(0.1)


def test_linear_outcomes_give_zero_proxy():
    xs = np.random.default_rng(0).uniform(-1, 1, 500)
    vp = variance_proxy_regression(Sample(xs, 3 * xs - 2), 2)
    assert vp.value <= 1e-12
    assert vp.kind == "regression_full" and vp.pilot_b == pytest.approx(500 ** (-1 / 3))


def test_simple_proxy_constant_outcomes():
    xs = np.random.default_rng(0).uniform(-1, 1, 300)
    assert variance_proxy_regression_simple(Sample(xs, np.full(300, 4.0)), 1).value == pytest.approx(0, abs=1e-20)


def test_regression_proxy_consistency():
    # C_V = V(0) / f(0) * int l_1**2 = 2 * 0.6
    vals = [variance_proxy_regression(_uniform_sample(r, 5000), 1).value for r in range(200)]
    assert np.mean(vals) == pytest.approx(1.2, rel=0.10)


def test_simple_proxy_consistency():
    vals = [variance_proxy_regression_simple(_uniform_sample(r, 5000), 1).value for r in range(200)]
    assert np.mean(vals) == pytest.approx(1.2, rel=0.15)


def test_simple_and_full_agree():
    diffs = []
    for r in range(100):
        smp = _uniform_sample(1000 + r, 10**4)
        diffs.append(abs(variance_proxy_regression_simple(smp, 1).value - variance_proxy_regression(smp, 1).value))
    assert np.median(diffs) < 0.1


def test_boundary_proxy_uses_one_sided_limit():
    # design U[0, 1]: C_V = 1 / 1 * int_0^1 l'_1**2 = 4.498
    vals = []
    for r in range(100):
        rng = replication_rng(55, r)
        xs = rng.uniform(0, 1, 5000)
        vals.append(variance_proxy_regression(Sample(xs, xs + rng.standard_normal(5000)), 1, boundary=True).value)
    assert np.mean(vals) == pytest.approx(4.49798, rel=0.10)


def test_density_proxy_no_mass():
    xs = np.linspace(5, 6, 100)
    assert variance_proxy_density(xs, 1, K1, 0.0).value == 0.0


def test_density_proxy_consistency():
    vals = [variance_proxy_density(replication_rng(7, r).uniform(-1, 1, 10**5), 1, K1).value for r in range(20)]
    assert np.mean(vals) == pytest.approx(0.3, rel=0.05)


def test_density_proxy_shuffle_stability():
    xs = replication_rng(8, 0).uniform(-1, 1, 10**5)
    rng = np.random.default_rng(0)
    vals = [variance_proxy_density(rng.permutation(xs), 1, K1).value for _ in range(50)]
    assert np.std(vals, ddof=1) < 0.05 * np.mean(vals)


def test_density_proxy_odd_n_drops_last():
    xs = np.array([0.0, 0.1, 0.2, 0.3, 9.0])
    g = 5 ** (-1 / 3)
    k = K1(xs[:4] / g)
    expected = ((k[1] - k[0]) ** 2 + (k[3] - k[2]) ** 2) / (4 * g)
    assert variance_proxy_density(xs, 1, K1).value == pytest.approx(expected, rel=1e-14)


def test_density_proxy_far_points_do_not_contribute():
    rng = np.random.default_rng(2)
    xs = rng.uniform(-1, 1, 1000)
    far = np.where(np.abs(xs) > 0.9, xs * 10, xs)
    g = 1000 ** (-1 / 3)
    assert np.all(np.abs(xs[np.abs(xs) > 0.9]) > g)
    assert variance_proxy_density(far, 1, K1).value == variance_proxy_density(xs, 1, K1).value


@given(st.lists(st.floats(-2, 2), min_size=4, max_size=80))
def test_density_proxy_nonnegative(xs):
    assert variance_proxy_density(xs, 2, density_kernel("epanechnikov", 2)).value >= 0


def test_proxy_rejects_negative():
    with pytest.raises(ValueError):
        VarianceProxy(-1.0, "density", 0.1)
