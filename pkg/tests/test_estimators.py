import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ebci import EBCIDensity, EBCIRegressor
from ebci.intervals import ebci_density_eta_free, ebci_regression_fixed_eta
from ebci.simharness import CuspParams, gen_cusp, replication_rng


@pytest.fixture
def sample():
    return gen_cusp(CuspParams(), 800, replication_rng(8, 0))


def test_regressor_matches_function(sample):
    est = EBCIRegressor(order=3, mode="fixed_eta", eta=4.0).fit(sample.xs.reshape(-1, 1), sample.ys)
    lib = ebci_regression_fixed_eta(sample, 0.2, 3, 0.05, eta=4.0)
    assert est.predict([[0.2]])[0] == lib.center
    assert est.predict_interval([0.2]).tolist() == [[lib.lower, lib.upper]]
    assert est.interval(0.2) == lib


def test_regressor_many_points(sample):
    est = EBCIRegressor(order=2).fit(sample.xs, sample.ys)
    grid = np.linspace(-0.5, 0.5, 5)
    bands = est.predict_interval(grid)
    assert bands.shape == (5, 2) and np.all(bands[:, 0] < bands[:, 1])
    assert np.all((bands[:, 0] <= est.predict(grid)) & (est.predict(grid) <= bands[:, 1]))


def test_params_and_clone():
    est = EBCIRegressor(order=3, alpha=0.1, side="upper")
    assert est.get_params()["alpha"] == 0.1
    assert clone(est).get_params() == est.get_params()


def test_validation(sample):
    with pytest.raises(ValueError, match="order"):
        EBCIRegressor().fit(sample.xs, sample.ys)
    with pytest.raises(ValueError, match="eta"):
        EBCIRegressor(order=3, mode="fixed_eta").fit(sample.xs, sample.ys)
    with pytest.raises(ValueError):
        EBCIRegressor(order=3).fit(np.c_[sample.xs, sample.xs], sample.ys)
    with pytest.raises(NotFittedError):
        EBCIRegressor(order=3).predict([0.0])


def test_density_matches_function():
    xs = replication_rng(9, 0).uniform(-1, 1, 2000)
    est = EBCIDensity(order=2).fit(xs)
    lib = ebci_density_eta_free(xs, 0.0, 2, 0.05)
    assert est.interval(0.0) == lib
    assert est.predict([0.0])[0] == lib.center
