"""Feasible variance proxies for the regression and density intervals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import DensityKernel, get_kernel
from .lpreg import InsufficientLocalData, Sample, lp_fit, lp_weights, loo_pilot_predictions

__all__ = [
    "VarianceProxy",
    "pilot_bandwidths",
    "variance_proxy_regression",
    "variance_proxy_regression_simple",
    "variance_proxy_density",
]

REGRESSION_FULL = "regression_full"
REGRESSION_SIMPLE = "regression_simple"
DENSITY = "density"


@dataclass(frozen=True)
class VarianceProxy:
    value: float
    kind: str
    pilot_g: float
    pilot_b: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"variance proxy must be finite and nonnegative, got {self.value!r}")


def pilot_bandwidths(n: int, S: int) -> tuple[float, float]:
    """Return ``(g, b) = (n**(-1/(2S+1)), n**(-1/3))``."""
    return n ** (-1.0 / (2 * S + 1)), n ** (-1.0 / 3.0)


def _remedy(exc: InsufficientLocalData, n: int, S: int, g: float) -> InsufficientLocalData:
    return InsufficientLocalData(
        f"variance proxy fit failed at pilot bandwidth g={g:.4g} (n={n}, S={S}): {exc}. "
        "Increase n or lower the order S.",
        effective_count=exc.effective_count,
    )


def variance_proxy_regression(
    sample: Sample, S: int, kernel="epanechnikov", x0: float = 0.0, boundary: bool = False,
    pilot_order: int = 1,
) -> VarianceProxy:
    """Residual-based proxy ``n g sum_i W_ig(x0)**2 (Y_i - m_{-i}(X_i))**2``.

    ``W_ig`` are order-``S`` weights at ``g = n**(-1/(2S+1))``; the residuals
    come from leave-one-out pilot fits of order ``pilot_order`` at
    ``b = n**(-1/3)``. Only observations with nonzero weight need a pilot fit.
    """
    n = sample.n
    g, b = pilot_bandwidths(n, S)
    spec = get_kernel(kernel, boundary=boundary)
    try:
        w = lp_weights(sample.xs, x0, g, S, spec).weights
    except InsufficientLocalData as exc:
        raise _remedy(exc, n, S, g) from exc
    active = np.flatnonzero(w)
    preds = loo_pilot_predictions(sample, b, pilot_order, spec.interior(), at=active)
    resid = sample.ys[active] - preds
    value = n * g * float(np.sum(w[active] ** 2 * resid**2))
    return VarianceProxy(value=value, kind=REGRESSION_FULL, pilot_g=g, pilot_b=b)


def variance_proxy_regression_simple(
    sample: Sample, S: int, kernel="epanechnikov", x0: float = 0.0, boundary: bool = False,
) -> VarianceProxy:
    """Cheaper proxy ``n g sum_i W_ig(x0)**2 (Y_i - m_b(x0))**2`` with ``g = b``.

    Residuals are taken around the single fit ``m_b(x0)`` instead of
    leave-one-out pilot fits, which suits bounded or sub-Gaussian outcomes.
    """
    n = sample.n
    g, _ = pilot_bandwidths(n, S)
    spec = get_kernel(kernel, boundary=boundary)
    try:
        ws = lp_weights(sample.xs, x0, g, S, spec)
    except InsufficientLocalData as exc:
        raise _remedy(exc, n, S, g) from exc
    centre = ws.apply(sample.ys)
    value = n * g * float(ws.weights**2 @ (sample.ys - centre) ** 2)
    return VarianceProxy(value=value, kind=REGRESSION_SIMPLE, pilot_g=g, pilot_b=g)


def variance_proxy_density(xs, S: int, kernel: DensityKernel, x0: float = 0.0) -> VarianceProxy:
    """Paired-difference proxy ``(1/(n g)) sum_i (K_{2i} - K_{2i-1})**2``.

    Observations are paired in the order given. An odd final observation is
    dropped; the normalising count is then the even count actually used while
    ``g`` still follows the full sample size.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size < 4:
        raise ValueError(f"the density proxy needs at least 4 observations, got {xs.size}")
    g, _ = pilot_bandwidths(xs.size, S)
    if xs.size % 2:
        xs = xs[:-1]
    n = xs.size
    vals = kernel((xs - x0) / g)
    value = float(np.sum((vals[1::2] - vals[0::2]) ** 2)) / (n * g)
    return VarianceProxy(value=value, kind=DENSITY, pilot_g=g)
