"""Local polynomial weights, point estimates and leave-one-out pilot fits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import MAX_CONDITION, get_kernel, poly_basis

__all__ = [
    "Sample",
    "WeightSet",
    "InsufficientLocalData",
    "lp_weights",
    "lp_fit",
    "loo_pilot_predictions",
]


class InsufficientLocalData(ValueError):
    """Too few observations inside the kernel window for an order-S fit."""

    def __init__(self, message, effective_count=0):
        super().__init__(message)
        self.effective_count = effective_count


@dataclass(frozen=True)
class Sample:
    """Paired covariate/outcome observations."""

    xs: np.ndarray = field(repr=False)
    ys: np.ndarray = field(repr=False)

    def __post_init__(self):
        xs = np.ascontiguousarray(self.xs, dtype=float).ravel()
        ys = np.ascontiguousarray(self.ys, dtype=float).ravel()
        if xs.shape != ys.shape:
            raise ValueError(f"xs and ys differ in length ({xs.size} vs {ys.size})")
        if xs.size < 2:
            raise ValueError("a sample needs at least 2 observations")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("sample contains non-finite values")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return self.xs.size

    def reflected(self) -> "Sample":
        return Sample(-self.xs, self.ys)


@dataclass(frozen=True)
class WeightSet:
    weights: np.ndarray = field(repr=False)
    h: float
    S: int
    x0: float
    effective_count: int

    def apply(self, ys) -> float:
        return float(self.weights @ np.asarray(ys, dtype=float))


def _check_bandwidth(h):
    if not (np.isfinite(h) and h > 0):
        raise ValueError(f"bandwidth must be positive and finite, got {h!r}")


def lp_weights(sample_xs, x0: float, h: float, S: int, kernel="epanechnikov") -> WeightSet:
    """Order-``S`` local polynomial weights for the fitted value at ``x0``.

    The weights are ``e0^T M^{-1} K(u_i) r(u_i)`` with ``u_i = (X_i - x0) / h``
    and ``M = sum_i K(u_i) r(u_i) r(u_i)^T``. They reproduce polynomials of
    degree ``<= S`` exactly.

    Raises
    ------
    InsufficientLocalData
        If fewer than ``S + 1`` points carry positive kernel weight or the
        local moment matrix has condition number above ``1e12``.
    """
    _check_bandwidth(h)
    spec = get_kernel(kernel)
    xs = np.asarray(sample_xs, dtype=float).ravel()
    u = (xs - x0) / h
    k = spec(u)
    active = np.flatnonzero(k > 0)
    count = active.size
    if count < S + 1:
        raise InsufficientLocalData(
            f"only {count} observations within h={h:.4g} of x0={x0:.4g}; "
            f"an order-{S} fit needs at least {S + 1} (widen h)",
            effective_count=count,
        )
    R = poly_basis(u[active], S)
    ka = k[active]
    M = (R * ka[:, None]).T @ R
    eig = np.linalg.eigvalsh(M)
    cond = np.inf if eig[0] <= 0 else eig[-1] / eig[0]
    if cond > MAX_CONDITION:
        raise InsufficientLocalData(
            f"local moment matrix at x0={x0:.4g}, h={h:.4g} is ill-conditioned "
            f"(condition {cond:.3g}, {count} points in window)",
            effective_count=count,
        )
    e0 = np.zeros(S + 1)
    e0[0] = 1.0
    a = np.linalg.solve(M, e0)
    weights = np.zeros_like(xs)
    weights[active] = ka * (R @ a)
    return WeightSet(weights=weights, h=float(h), S=int(S), x0=float(x0), effective_count=count)


def lp_fit(sample: Sample, x0: float, h: float, S: int, kernel="epanechnikov") -> float:
    """Local polynomial estimate ``sum_i W_i(x0) Y_i``."""
    return lp_weights(sample.xs, x0, h, S, kernel).apply(sample.ys)


def loo_pilot_predictions(
    sample: Sample, b: float, S_pilot: int = 1, kernel="epanechnikov", at=None
) -> np.ndarray:
    """Leave-one-out local polynomial predictions ``m_{-i}(X_i)``.

    Parameters
    ----------
    sample : Sample
    b : float
        Pilot bandwidth.
    S_pilot : int, default 1
        Order of the pilot fit (local linear by default).
    kernel : str or KernelSpec
        Kernel family; the pilot always uses the two-sided support.
    at : array-like of int, optional
        Indices at which to predict. Defaults to every observation.

    Returns
    -------
    ndarray
        One prediction per requested index. A singular leave-one-out fit falls
        back to the mean of the other in-window outcomes, and an empty window
        to the mean of all other outcomes.
    """
    _check_bandwidth(b)
    spec = get_kernel(kernel, boundary=False)
    poly_basis(0.0, S_pilot)
    xs, ys, n = sample.xs, sample.ys, sample.n
    order = np.argsort(xs, kind="stable")
    xs_s, ys_s = xs[order], ys[order]
    rank = np.empty(n, dtype=np.intp)
    rank[order] = np.arange(n)
    targets = np.arange(n) if at is None else np.asarray(at, dtype=np.intp).ravel()
    if targets.size == 0:
        return np.empty(0)
    pos = rank[targets]
    centre = xs_s[pos]
    lo = np.searchsorted(xs_s, centre - b, side="left")
    hi = np.searchsorted(xs_s, centre + b, side="right")
    width = max(int((hi - lo).max()), 1)
    idx = lo[:, None] + np.arange(width)
    in_window = (idx < hi[:, None]) & (idx != pos[:, None])
    np.minimum(idx, n - 1, out=idx)
    u = (xs_s[idx] - centre[:, None]) / b
    k = spec(u)
    k[~in_window] = 0.0
    ky = k * ys_s[idx]

    # power sums sum_j k_j u_j**p fill the Hankel moment matrix
    dim = S_pilot + 1
    sums = np.empty((targets.size, 2 * dim - 1))
    rhs = np.empty((targets.size, dim))
    pw, pwy = k, ky
    for p in range(2 * dim - 1):
        sums[:, p] = pw.sum(axis=1)
        if p < dim:
            rhs[:, p] = pwy.sum(axis=1)
            pwy = pwy * u
        pw = pw * u
    M = sums[:, np.add.outer(np.arange(dim), np.arange(dim))]
    counts = (k > 0).sum(axis=1)
    eig = np.linalg.eigvalsh(M)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(eig[:, 0] > 0, eig[:, -1] / eig[:, 0], np.inf)
    good = (counts >= S_pilot + 1) & (cond <= MAX_CONDITION)

    pred = np.empty(targets.size)
    if good.any():
        pred[good] = np.linalg.solve(M[good], rhs[good][..., None])[:, 0, 0]
    bad = ~good
    if bad.any():
        n_win = in_window[bad].sum(axis=1)
        win_sum = np.where(in_window[bad], ys_s[idx[bad]], 0.0).sum(axis=1)
        global_loo = (ys.sum() - ys[targets[bad]]) / (n - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            pred[bad] = np.where(n_win > 0, win_sum / np.maximum(n_win, 1), global_loo)
    return pred
