"""Feasible empirical Bernstein confidence intervals.

Two modes are provided for both regression and density estimation at a point:

``fixed_eta``
    The user supplies a bias budget ``eta`` so that ``eta * h**S`` bounds the
    worst-case bias. The bandwidth is a plug-in value projected onto a finite
    grid and the radius is minimax up to ``1 + (log n)**-3``.
``eta_free``
    No bias budget. The bandwidth is ``n**(-1/(2S+1))`` and the radius is
    inflated by a slowly diverging factor ``d_n``.

Left boundaries use the one-sided kernel on ``[0, 1]``; right boundaries are
reduced to the left case by reflecting the covariates.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bandwidth import build_grid, naive_bandwidth, plugin_bandwidth, project_to_grid
from .kernels import BOUNDARY, INTERIOR, density_kernel, get_kernel
from .lpreg import Sample, lp_fit
from .variance import VarianceProxy, variance_proxy_density, variance_proxy_regression

__all__ = [
    "IntervalResult",
    "EtaFreePolicy",
    "EmptyWindowError",
    "EmptyWindowWarning",
    "CalibrationWarning",
    "SIDES",
    "BOUNDARY_FLAGS",
    "calibration_level",
    "resolve_boundary",
    "radius_fixed_eta",
    "radius_eta_free",
    "ebci_regression_fixed_eta",
    "ebci_regression_eta_free",
    "ebci_density_fixed_eta",
    "ebci_density_eta_free",
    "kde_at",
]

SIDES = ("two", "upper", "lower")
BOUNDARY_FLAGS = ("interior", "left", "right", "auto")
FIXED_ETA = "fixed_eta"
ETA_FREE = "eta_free"


class EmptyWindowError(ValueError):
    """No observation falls inside the kernel window around ``x0``."""


class EmptyWindowWarning(UserWarning):
    """The density variance proxy is zero, so the interval degenerates to a point."""


class CalibrationWarning(UserWarning):
    """A requested calibration rule does not apply and was replaced."""


@dataclass(frozen=True)
class IntervalResult:
    """A confidence interval for ``m(x0)`` or ``f(x0)``.

    For ``side="upper"`` the interval is ``(-inf, center + radius]``; for
    ``side="lower"`` it is ``[center - radius, inf)``.
    """

    center: float
    h_used: float
    radius: float
    lower: float
    upper: float
    side: str
    mode: str
    t_used: float
    cv_proxy: VarianceProxy
    n: int
    S: int
    alpha: float
    x0: float
    boundary: str
    eta: float | None = None
    d_n: float | None = None

    @property
    def width(self) -> float:
        """Length of the two-sided interval, or the radius for one-sided ones."""
        return 2.0 * self.radius if self.side == "two" else self.radius

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        out = {
            "center": self.center,
            "lower": self.lower,
            "upper": self.upper,
            "radius": self.radius,
            "h": self.h_used,
            "side": self.side,
            "mode": self.mode,
            "t": self.t_used,
            "proxy": self.cv_proxy.value,
            "proxy_kind": self.cv_proxy.kind,
            "n": self.n,
            "S": self.S,
            "alpha": self.alpha,
            "x0": self.x0,
            "boundary": self.boundary,
        }
        if self.eta is not None:
            out["eta"] = self.eta
        if self.d_n is not None:
            out["d_n"] = self.d_n
        return out


@dataclass(frozen=True)
class EtaFreePolicy:
    """Inflation factor ``d_n`` for the eta-free radius.

    ``kind="power"`` gives ``n**tau``; ``kind="loglog"`` gives
    ``log(n) * log(log(n))``.
    """

    kind: str = "power"
    tau: float = 0.001

    def __post_init__(self):
        if self.kind not in ("power", "loglog"):
            raise ValueError(f"policy kind must be 'power' or 'loglog', got {self.kind!r}")
        if self.kind == "power" and not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be positive, got {self.tau!r}")

    def d_n(self, n: int) -> float:
        if self.kind == "power":
            return float(n) ** self.tau
        # log n * log log n drops below 1 for n < e**e
        return max(1.0, math.log(n) * math.log(math.log(n))) if n >= 3 else 1.0


def _check_common(alpha, S, side):
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if int(S) != S or S < 1:
        raise ValueError(f"S must be a positive integer, got {S!r}")
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")


def calibration_level(alpha: float, side: str) -> float:
    """``alpha`` for one-sided intervals, ``alpha / 2`` for two-sided."""
    return alpha / 2.0 if side == "two" else alpha


def _check_radius_inputs(cv_hat, t, S, n):
    if not (0.0 < t < 1.0):
        raise ValueError(f"t must lie in (0, 1), got {t!r}")
    if not (cv_hat >= 0 and math.isfinite(cv_hat)):
        raise ValueError(f"variance proxy must be finite and nonnegative, got {cv_hat!r}")
    if n < 2 or S < 1:
        raise ValueError(f"need n >= 2 and S >= 1, got n={n}, S={S}")


def radius_fixed_eta(cv_hat: float, t: float, S: int, eta: float, n: int) -> float:
    """``(2S+1)(1+xi_n) eta**(1/(2S+1)) (2 log(1/t) cv_hat / (4 S**2))**(S/(2S+1)) n**(-S/(2S+1))``
    with ``xi_n = (log n)**-3``."""
    _check_radius_inputs(cv_hat, t, S, n)
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta!r}")
    xi = math.log(n) ** -3
    p = S / (2 * S + 1)
    core = 2.0 * math.log(1.0 / t) * cv_hat / (4.0 * S * S)
    return (2 * S + 1) * (1.0 + xi) * eta ** (1.0 / (2 * S + 1)) * core**p * n ** (-p)


def radius_eta_free(cv_hat: float, t: float, S: int, n: int, policy: EtaFreePolicy | None = None) -> float:
    """``d_n (2 log(1/t) cv_hat / n)**(S/(2S+1))``."""
    _check_radius_inputs(cv_hat, t, S, n)
    policy = policy or EtaFreePolicy()
    return policy.d_n(n) * (2.0 * math.log(1.0 / t) * cv_hat / n) ** (S / (2 * S + 1))


def resolve_boundary(flag: str, xs, x0: float, h: float) -> str:
    """Map ``auto`` to ``interior``, ``left`` or ``right``.

    ``auto`` declares a boundary when ``x0`` lies within ``h`` of the smallest
    or largest observed covariate.
    """
    if flag not in BOUNDARY_FLAGS:
        raise ValueError(f"boundary must be one of {BOUNDARY_FLAGS}, got {flag!r}")
    if flag != "auto":
        return flag
    xs = np.asarray(xs, dtype=float)
    lo_gap = x0 - xs.min()
    hi_gap = xs.max() - x0
    if lo_gap < h and lo_gap <= hi_gap:
        return "left"
    if hi_gap < h:
        return "right"
    return "interior"


def _endpoints(center, radius, side):
    if side == "two":
        return center - radius, center + radius
    if side == "upper":
        return -math.inf, center + radius
    return center - radius, math.inf


def _oriented(xs, x0, case):
    """Reflect a right-boundary problem into a left-boundary one."""
    if case == "right":
        return -np.asarray(xs, dtype=float), -x0
    return np.asarray(xs, dtype=float), x0


def _regression_setup(sample, x0, S, alpha, side, boundary, kernel):
    if not isinstance(sample, Sample):
        sample = Sample(*sample)
    _check_common(alpha, S, side)
    case = resolve_boundary(boundary, sample.xs, x0, naive_bandwidth(sample.n, S))
    xs, x0_o = _oriented(sample.xs, x0, case)
    oriented = Sample(xs, sample.ys) if case == "right" else sample
    spec = get_kernel(kernel, boundary=(case != "interior"))
    return oriented, x0_o, case, spec


def ebci_regression_fixed_eta(
    sample, x0: float, S: int, alpha: float, eta: float, side: str = "two",
    boundary: str = "interior", kernel="epanechnikov",
) -> IntervalResult:
    """Fixed-eta EBCI for the regression function at ``x0``.

    The plug-in bandwidth is computed at ``t = alpha`` (one-sided) or
    ``alpha / 2`` (two-sided), projected onto the finite grid, and the
    estimate is recomputed at the projected bandwidth.
    """
    if not (eta > 0 and math.isfinite(eta)):
        raise ValueError(f"eta must be positive and finite, got {eta!r}")
    smp, x0_o, case, spec = _regression_setup(sample, x0, S, alpha, side, boundary, kernel)
    n = smp.n
    grid = build_grid(n, S)
    t = calibration_level(alpha, side)
    proxy = variance_proxy_regression(smp, S, spec.name, x0=x0_o, boundary=case != "interior")
    h_hat = plugin_bandwidth(proxy.value, t, S, eta, n)
    h = project_to_grid(h_hat, grid)
    center = lp_fit(smp, x0_o, h, S, spec)
    radius = radius_fixed_eta(proxy.value, t, S, eta, n)
    lower, upper = _endpoints(center, radius, side)
    return IntervalResult(
        center=center, h_used=h, radius=radius, lower=lower, upper=upper, side=side,
        mode=FIXED_ETA, t_used=t, cv_proxy=proxy, n=n, S=int(S), alpha=alpha,
        x0=float(x0), boundary=case, eta=float(eta),
    )


def _eta_free_level(alpha, side, case, unified):
    if unified and side == "two":
        if case == "interior":
            return alpha
        warnings.warn(
            "unified calibration applies only at interior points; using alpha/2",
            CalibrationWarning,
            stacklevel=3,
        )
    return calibration_level(alpha, side)


def ebci_regression_eta_free(
    sample, x0: float, S: int, alpha: float, side: str = "two",
    policy: EtaFreePolicy | None = None, boundary: str = "interior",
    kernel="epanechnikov", unified_calibration: bool = False,
) -> IntervalResult:
    """Eta-free EBCI for the regression function at ``x0``.

    Uses the deterministic bandwidth ``n**(-1/(2S+1))``. With
    ``unified_calibration`` a two-sided interior interval is calibrated at
    ``t = alpha`` instead of ``alpha / 2``.
    """
    smp, x0_o, case, spec = _regression_setup(sample, x0, S, alpha, side, boundary, kernel)
    policy = policy or EtaFreePolicy()
    n = smp.n
    h = naive_bandwidth(n, S)
    t = _eta_free_level(alpha, side, case, unified_calibration)
    proxy = variance_proxy_regression(smp, S, spec.name, x0=x0_o, boundary=case != "interior")
    center = lp_fit(smp, x0_o, h, S, spec)
    radius = radius_eta_free(proxy.value, t, S, n, policy)
    lower, upper = _endpoints(center, radius, side)
    return IntervalResult(
        center=center, h_used=h, radius=radius, lower=lower, upper=upper, side=side,
        mode=ETA_FREE, t_used=t, cv_proxy=proxy, n=n, S=int(S), alpha=alpha,
        x0=float(x0), boundary=case, d_n=policy.d_n(n),
    )


def kde_at(xs, x0: float, h: float, kernel) -> float:
    """``(1 / (n h)) sum_i K((X_i - x0) / h)`` for a (density) kernel callable."""
    xs = np.asarray(xs, dtype=float).ravel()
    return float(np.sum(kernel((xs - x0) / h))) / (xs.size * h)


def _density_setup(xs, x0, S, alpha, side, boundary, kernel):
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size < 4:
        raise ValueError(f"need at least 4 observations, got {xs.size}")
    if not np.all(np.isfinite(xs)):
        raise ValueError("xs contains non-finite values")
    _check_common(alpha, S, side)
    case = resolve_boundary(boundary, xs, x0, naive_bandwidth(xs.size, S))
    xs_o, x0_o = _oriented(xs, x0, case)
    dk = density_kernel(get_kernel(kernel).name, int(S), BOUNDARY if case != "interior" else INTERIOR)
    return xs_o, x0_o, case, dk


def ebci_density_fixed_eta(
    xs, x0: float, S: int, alpha: float, eta: float, side: str = "two",
    boundary: str = "interior", kernel="epanechnikov",
) -> IntervalResult:
    """Fixed-eta EBCI for the density at ``x0`` with an order-``S`` kernel.

    Raises
    ------
    EmptyWindowError
        If no observation carries kernel mass at the pilot bandwidth, which
        leaves the plug-in bandwidth undefined.
    """
    if not (eta > 0 and math.isfinite(eta)):
        raise ValueError(f"eta must be positive and finite, got {eta!r}")
    xs_o, x0_o, case, dk = _density_setup(xs, x0, S, alpha, side, boundary, kernel)
    n = xs_o.size
    t = calibration_level(alpha, side)
    proxy = variance_proxy_density(xs_o, S, dk, x0_o)
    if proxy.value == 0.0:
        raise EmptyWindowError(
            f"no observations inside the pilot window of width {proxy.pilot_g:.4g} at x0={x0:.4g}"
        )
    h = project_to_grid(plugin_bandwidth(proxy.value, t, S, eta, n), build_grid(n, S))
    center = kde_at(xs_o, x0_o, h, dk)
    radius = radius_fixed_eta(proxy.value, t, S, eta, n)
    lower, upper = _endpoints(center, radius, side)
    return IntervalResult(
        center=center, h_used=h, radius=radius, lower=lower, upper=upper, side=side,
        mode=FIXED_ETA, t_used=t, cv_proxy=proxy, n=n, S=int(S), alpha=alpha,
        x0=float(x0), boundary=case, eta=float(eta),
    )


def ebci_density_eta_free(
    xs, x0: float, S: int, alpha: float, side: str = "two",
    policy: EtaFreePolicy | None = None, boundary: str = "interior",
    kernel="epanechnikov",
) -> IntervalResult:
    """Eta-free EBCI for the density at ``x0``.

    A zero variance proxy yields a zero radius and an
    :class:`EmptyWindowWarning`.
    """
    xs_o, x0_o, case, dk = _density_setup(xs, x0, S, alpha, side, boundary, kernel)
    policy = policy or EtaFreePolicy()
    n = xs_o.size
    h = naive_bandwidth(n, S)
    t = calibration_level(alpha, side)
    proxy = variance_proxy_density(xs_o, S, dk, x0_o)
    if proxy.value == 0.0:
        warnings.warn(
            f"density variance proxy is zero at x0={x0:.4g}; the interval is a single point",
            EmptyWindowWarning,
            stacklevel=2,
        )
    center = kde_at(xs_o, x0_o, h, dk)
    radius = radius_eta_free(proxy.value, t, S, n, policy)
    lower, upper = _endpoints(center, radius, side)
    return IntervalResult(
        center=center, h_used=h, radius=radius, lower=lower, upper=upper, side=side,
        mode=ETA_FREE, t_used=t, cv_proxy=proxy, n=n, S=int(S), alpha=alpha,
        x0=float(x0), boundary=case, d_n=policy.d_n(n),
    )
