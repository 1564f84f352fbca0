import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ebci.bandwidth import build_grid, naive_bandwidth, plugin_bandwidth, project_to_grid
from ebci.intervals import (
    CalibrationWarning,
    EmptyWindowError,
    EmptyWindowWarning,
    EtaFreePolicy,
    calibration_level,
    ebci_density_eta_free,
    ebci_density_fixed_eta,
    ebci_regression_eta_free,
    ebci_regression_fixed_eta,
    radius_eta_free,
    radius_fixed_eta,
    resolve_boundary,
)
from ebci.kernels import density_kernel
from ebci.lpreg import Sample, lp_fit
from ebci.simharness import CuspParams, gen_cusp, replication_rng
from ebci.variance import variance_proxy_regression

# mpmath oracle values
R_FIXED = 0.18233741296737242
R_FREE = 0.12146438622106153
R_FREE_LOGLOG = 1.6104154598017555
R_DENSITY_FREE = 0.08729806679451266


def _cusp(n=1000, seed=0, support="interior"):
    return gen_cusp(CuspParams(delta=1.0, support=support), n, replication_rng(seed, 0))


def test_radius_fixed_eta_example():
    r = radius_fixed_eta(1.2, 0.05, 3, 1.0, 1000)
    assert r == pytest.approx(R_FIXED, rel=1e-12)
    assert r == pytest.approx(0.1825, abs=5e-4)
    assert radius_fixed_eta(1.2, 0.05, 3, 2.0, 1000) / r == pytest.approx(2 ** (1 / 7), rel=1e-14)
    assert radius_fixed_eta(1.2, 0.01, 3, 1.0, 1000) > r


def test_radius_eta_free_examples():
    assert radius_eta_free(1.2, 0.05, 3, 1000) == pytest.approx(R_FREE, rel=1e-12)
    loglog = EtaFreePolicy("loglog")
    assert loglog.d_n(1000) == pytest.approx(13.350236863105728, rel=1e-13)
    core = (2 * math.log(20) * 1.2 / 1000) ** (3 / 7)
    assert radius_eta_free(1.2, 0.05, 3, 1000, loglog) == loglog.d_n(1000) * core
    assert radius_eta_free(1.2, 0.05, 3, 1000, loglog) == pytest.approx(R_FREE_LOGLOG, rel=1e-12)
    assert EtaFreePolicy().d_n(1000) < 1.007


def test_density_radius_example():
    # the written arithmetic (2.2134e-3)**0.4 * 1.0069 evaluates to 0.08730
    policy = EtaFreePolicy("power", math.log(1.0069) / math.log(1000))
    assert radius_eta_free(0.3, 0.025, 2, 1000, policy) == pytest.approx(R_DENSITY_FREE, rel=1e-10)


@given(st.floats(0.01, 10), st.floats(1e-6, 0.5), st.floats(0.01, 10), st.integers(10, 10**6),
       st.integers(1, 4), st.floats(1.01, 5))
def test_radius_positivity_and_monotonicity(cv, t, eta, n, S, k):
    assume(t * k < 1)
    r = radius_fixed_eta(cv, t, S, eta, n)
    assert r > 0
    assert radius_fixed_eta(cv, t / k, S, eta, n) > r
    assert radius_fixed_eta(cv * k, t, S, eta, n) > r
    assert radius_fixed_eta(cv, t, S, eta * k, n) > r
    rf = radius_eta_free(cv, t, S, n)
    assert rf > 0
    assert radius_eta_free(cv * k, t, S, n) > rf
    assert radius_eta_free(cv, t / k, S, n) > rf
    # homogeneity in cv
    assert radius_eta_free(cv * k, t, S, n) / rf == pytest.approx(k ** (S / (2 * S + 1)), rel=1e-12)


def test_policy_validation():
    with pytest.raises(ValueError):
        EtaFreePolicy("cube")
    with pytest.raises(ValueError):
        EtaFreePolicy("power", 0.0)
    assert EtaFreePolicy("loglog").d_n(5) >= 1.0


def test_calibration_level():
    assert calibration_level(0.05, "two") == 0.025
    assert calibration_level(0.05, "upper") == 0.05


def test_fixed_eta_assembly():
    smp = _cusp()
    res = ebci_regression_fixed_eta(smp, 0.0, 3, 0.05, eta=5.0)
    proxy = variance_proxy_regression(smp, 3)
    h = project_to_grid(plugin_bandwidth(proxy.value, 0.025, 3, 5.0, 1000), build_grid(1000, 3))
    assert res.h_used == h and res.t_used == 0.025
    assert res.center == lp_fit(smp, 0.0, h, 3)
    assert res.radius == radius_fixed_eta(proxy.value, 0.025, 3, 5.0, 1000)
    assert res.upper - res.lower == pytest.approx(2 * res.radius, rel=1e-14)
    assert (res.upper + res.lower) / 2 == pytest.approx(res.center, rel=1e-14)
    assert res.mode == "fixed_eta" and res.eta == 5.0 and res.d_n is None


def test_one_sided_endpoints():
    smp = _cusp()
    up = ebci_regression_fixed_eta(smp, 0.0, 3, 0.05, eta=5.0, side="upper")
    lo = ebci_regression_fixed_eta(smp, 0.0, 3, 0.05, eta=5.0, side="lower")
    assert up.lower == -math.inf and math.isfinite(up.upper) and up.t_used == 0.05
    assert lo.upper == math.inf and math.isfinite(lo.lower)
    assert up.width == up.radius


def test_two_sided_contains_one_sided_intersection():
    smp = _cusp(seed=3)
    for side_fn in (ebci_regression_eta_free,):
        two = side_fn(smp, 0.0, 3, 0.05, side="two")
        up = side_fn(smp, 0.0, 3, 0.05, side="upper")
        lo = side_fn(smp, 0.0, 3, 0.05, side="lower")
        assert two.lower <= lo.lower and up.upper <= two.upper


def test_eta_free_assembly_and_unified():
    smp = _cusp()
    res = ebci_regression_eta_free(smp, 0.0, 3, 0.05, unified_calibration=True)
    assert res.h_used == naive_bandwidth(1000, 3)
    assert res.t_used == 0.05
    proxy = variance_proxy_regression(smp, 3)
    assert res.radius == radius_eta_free(proxy.value, 0.05, 3, 1000)
    assert res.center == lp_fit(smp, 0.0, res.h_used, 3)
    assert ebci_regression_eta_free(smp, 0.0, 3, 0.05).t_used == 0.025


def test_unified_falls_back_at_boundary():
    smp = _cusp(support="boundary")
    with pytest.warns(CalibrationWarning):
        res = ebci_regression_eta_free(smp, 0.0, 3, 0.05, boundary="left", unified_calibration=True)
    assert res.t_used == 0.025 and res.boundary == "left"


def test_auto_boundary_and_reflection():
    smp = _cusp(support="boundary")
    assert resolve_boundary("auto", smp.xs, 0.0, 0.37) == "left"
    assert resolve_boundary("auto", smp.xs, 1.0, 0.37) == "right"
    assert resolve_boundary("auto", smp.xs, 0.5, 0.37) == "interior"
    right = ebci_regression_eta_free(smp, 0.0, 3, 0.05, boundary="left")
    mirrored = Sample(-smp.xs, smp.ys)
    left = ebci_regression_eta_free(mirrored, 0.0, 3, 0.05, boundary="right")
    assert left.center == pytest.approx(right.center, rel=1e-12)
    assert left.radius == pytest.approx(right.radius, rel=1e-12)


def test_determinism():
    smp = _cusp()
    assert ebci_regression_eta_free(smp, 0.0, 3, 0.05) == ebci_regression_eta_free(smp, 0.0, 3, 0.05)


def test_fixed_eta_rejects_bad_inputs():
    smp = _cusp(n=200)
    with pytest.raises(ValueError):
        ebci_regression_fixed_eta(smp, 0.0, 3, 0.05, eta=0.0)
    with pytest.raises(ValueError):
        ebci_regression_fixed_eta(smp, 0.0, 3, 1.5, eta=1.0)
    with pytest.raises(ValueError):
        ebci_regression_eta_free(smp, 0.0, 3, 0.05, side="both")


def test_density_center_definition():
    xs = replication_rng(4, 0).uniform(-1, 1, 1000)
    res = ebci_density_eta_free(xs, 0.0, 2, 0.05)
    dk = density_kernel("epanechnikov", 2)
    h = 1000 ** (-1 / 5)
    assert res.center == pytest.approx(np.sum(dk(xs / h)) / (1000 * h), rel=1e-12)
    fixed = ebci_density_fixed_eta(xs, 0.0, 2, 0.05, eta=1.0)
    assert fixed.center == pytest.approx(np.sum(dk(xs / fixed.h_used)) / (1000 * fixed.h_used), rel=1e-12)


def test_density_empty_window():
    xs = np.linspace(5, 6, 100)
    with pytest.warns(EmptyWindowWarning):
        res = ebci_density_eta_free(xs, 0.0, 2, 0.05)
    assert res.radius == 0.0
    with pytest.raises(EmptyWindowError):
        ebci_density_fixed_eta(xs, 0.0, 2, 0.05, eta=1.0)


def _density_coverage(method, side, B=2000, n=1000, **kw):
    hits = 0
    for rep in range(B):
        xs = replication_rng(2024, rep).uniform(-1, 1, n)
        res = method(xs, 0.0, 2, 0.05, side=side, **kw)
        hits += res.contains(0.5)
    return hits / B


@pytest.mark.slow
@pytest.mark.parametrize("side", ["two", "upper", "lower"])
def test_density_fixed_eta_coverage(side):
    assert _density_coverage(ebci_density_fixed_eta, side, eta=1.0) >= 0.93


@pytest.mark.slow
def test_density_eta_free_coverage():
    assert _density_coverage(ebci_density_eta_free, "two") >= 0.93
