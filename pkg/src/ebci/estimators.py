"""scikit-learn style wrappers around the interval constructors."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import intervals
from .lpreg import Sample

__all__ = ["EBCIRegressor", "EBCIDensity"]

_MODES = ("eta_free", "fixed_eta")


def _as_column(X):
    X = np.asarray(X, dtype=float) if not hasattr(X, "shape") else X
    if getattr(X, "ndim", 2) == 1:
        X = np.reshape(X, (-1, 1))
    return X


def _points(X):
    X = check_array(_as_column(X), ensure_2d=True)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single covariate column, got {X.shape[1]}")
    return X[:, 0]


class _IntervalMixin:
    def _check_params(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.mode == "fixed_eta" and self.eta is None:
            raise ValueError("mode='fixed_eta' requires eta")
        if self.order is None:
            raise ValueError("order (the smoothness S) must be given explicitly")

    def _policy(self):
        return intervals.EtaFreePolicy(self.policy, self.tau)

    def predict(self, X):
        """Point estimates at each row of ``X``."""
        return np.array([r.center for r in self._results(X)])

    def predict_interval(self, X):
        """``(m, 2)`` array of lower and upper endpoints (infinite for one-sided)."""
        return np.array([[r.lower, r.upper] for r in self._results(X)])

    def interval(self, x0: float) -> intervals.IntervalResult:
        """Full :class:`~ebci.intervals.IntervalResult` at a single point."""
        return self._results(np.array([x0]))[0]

    def _results(self, X):
        check_is_fitted(self, "X_")
        return [self._one(float(x0)) for x0 in _points(X)]


class EBCIRegressor(_IntervalMixin, RegressorMixin, BaseEstimator):
    """Local polynomial regression with empirical Bernstein intervals.

    Parameters
    ----------
    order : int
        Assumed smoothness order ``S``; the fit is a local polynomial of
        this degree. No default is assumed silently.
    alpha : float, default 0.05
    mode : {"eta_free", "fixed_eta"}, default "eta_free"
    eta : float, optional
        Bias budget; required when ``mode="fixed_eta"``.
    side : {"two", "upper", "lower"}, default "two"
    boundary : {"interior", "left", "right", "auto"}, default "auto"
    kernel : str, default "epanechnikov"
    tau : float, default 0.001
    policy : {"power", "loglog"}, default "power"
    unified_calibration : bool, default False

    Attributes
    ----------
    X_, y_ : ndarray
        Training covariates and outcomes.
    n_features_in_ : int
        Always 1.

    Examples
    --------
    >>> import numpy as np
    >>> rng = np.random.default_rng(0)
    >>> x = rng.uniform(-1, 1, 500)
    >>> y = np.sin(x) + rng.standard_normal(500)
    >>> est = EBCIRegressor(order=2).fit(x, y)
    >>> est.predict_interval([0.0]).shape
    (1, 2)
    """

    def __init__(self, order=None, alpha=0.05, mode="eta_free", eta=None, side="two",
                 boundary="auto", kernel="epanechnikov", tau=0.001, policy="power",
                 unified_calibration=False):
        self.order = order
        self.alpha = alpha
        self.mode = mode
        self.eta = eta
        self.side = side
        self.boundary = boundary
        self.kernel = kernel
        self.tau = tau
        self.policy = policy
        self.unified_calibration = unified_calibration

    def fit(self, X, y):
        self._check_params()
        X, y = check_X_y(_as_column(X), y, y_numeric=True)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single covariate column, got {X.shape[1]}")
        self.X_ = X[:, 0].copy()
        self.y_ = np.asarray(y, dtype=float).copy()
        self.n_features_in_ = 1
        self._sample = Sample(self.X_, self.y_)
        return self

    def _one(self, x0):
        common = dict(x0=x0, S=self.order, alpha=self.alpha, side=self.side,
                      boundary=self.boundary, kernel=self.kernel)
        if self.mode == "fixed_eta":
            return intervals.ebci_regression_fixed_eta(self._sample, eta=self.eta, **common)
        return intervals.ebci_regression_eta_free(
            self._sample, policy=self._policy(), unified_calibration=self.unified_calibration, **common
        )


class EBCIDensity(_IntervalMixin, BaseEstimator):
    """Kernel density estimation with empirical Bernstein intervals.

    Parameters match :class:`EBCIRegressor` except that there is no
    ``unified_calibration``. ``predict`` returns density estimates.
    """

    def __init__(self, order=None, alpha=0.05, mode="eta_free", eta=None, side="two",
                 boundary="auto", kernel="epanechnikov", tau=0.001, policy="power"):
        self.order = order
        self.alpha = alpha
        self.mode = mode
        self.eta = eta
        self.side = side
        self.boundary = boundary
        self.kernel = kernel
        self.tau = tau
        self.policy = policy

    def fit(self, X, y=None):
        self._check_params()
        self.X_ = _points(X).copy()
        self.n_features_in_ = 1
        return self

    def _one(self, x0):
        common = dict(x0=x0, S=self.order, alpha=self.alpha, side=self.side,
                      boundary=self.boundary, kernel=self.kernel)
        if self.mode == "fixed_eta":
            return intervals.ebci_density_fixed_eta(self.X_, eta=self.eta, **common)
        return intervals.ebci_density_eta_free(self.X_, policy=self._policy(), **common)
