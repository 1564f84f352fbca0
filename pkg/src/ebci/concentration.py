"""Empirical Bernstein deviation bounds for bounded independent observations.

Both bounds control the one-sided deviation ``sum_i (mu_i - theta_i)`` of
independent variables ``theta_i`` in ``[lo, hi]`` with means ``mu_i``. The
paired bound needs no knowledge of the means; the known-mean bound uses the
centred sum of squares.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["EBBound", "eb_bound_paired", "eb_bound_known_mean", "log_terms", "linear_term"]

_SQRT_5_3_PLUS_1 = math.sqrt(5.0 / 3.0) + 1.0


@dataclass(frozen=True)
class EBBound:
    """A one-sided ``1 - alpha`` upper bound on ``sum_i (mu_i - theta_i)``."""

    deviation: float
    variance_term: float
    linear_term: float
    alpha: float
    n: int
    variance_proxy: float
    dropped_last: bool = False
    simplified: float | None = field(default=None)


def log_terms(n: int, alpha: float) -> tuple[float, float]:
    """Return ``(log(n / ((n - 1) alpha)), log(2 n / alpha))``."""
    return math.log(n / ((n - 1) * alpha)), math.log(2.0 * n / alpha)


def linear_term(n: int, alpha: float, width: float) -> float:
    a1, a2 = log_terms(n, alpha)
    return width * a1 / 3.0 + width * _SQRT_5_3_PLUS_1 * math.sqrt(a1 * a2)


def _validate(values, lo, hi, alpha):
    values = np.asarray(values, dtype=float).ravel()
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not hi > lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if values.size and (values.min() < lo or values.max() > hi):
        raise ValueError(
            f"values outside [{lo}, {hi}]: min {values.min():.6g}, max {values.max():.6g}"
        )
    return values


def eb_bound_paired(values, range_lo: float, range_hi: float, alpha: float) -> EBBound:
    """Empirical Bernstein bound from consecutive paired differences.

    With ``V = sum_i (theta_{2i-1} - theta_{2i})**2`` the bound is
    ``sqrt(2 V A1) + L``; it holds for even ``n``. An odd final observation is
    dropped and flagged in ``dropped_last``.
    """
    values = _validate(values, range_lo, range_hi, alpha)
    dropped = values.size % 2 == 1
    if dropped:
        values = values[:-1]
    n = values.size
    if n < 2:
        raise ValueError("the paired bound needs at least 2 observations")
    v = float(np.sum((values[0::2] - values[1::2]) ** 2))
    a1, _ = log_terms(n, alpha)
    var_term = math.sqrt(2.0 * v * a1)
    lin = linear_term(n, alpha, range_hi - range_lo)
    return EBBound(
        deviation=var_term + lin,
        variance_term=var_term,
        linear_term=lin,
        alpha=alpha,
        n=n,
        variance_proxy=v,
        dropped_last=dropped,
    )


def eb_bound_known_mean(values, means, range_lo: float, range_hi: float, alpha: float) -> EBBound:
    """Bernstein-type bound using the centred sum ``V = sum_i (theta_i - mu_i)**2``.

    ``simplified`` carries the looser form
    ``sqrt(2 V log(1/alpha)) + sqrt(2 V / (n - 1)) + L``.
    """
    values = _validate(values, range_lo, range_hi, alpha)
    means = np.asarray(means, dtype=float).ravel()
    if means.shape != values.shape:
        raise ValueError(f"values and means differ in length ({values.size} vs {means.size})")
    n = values.size
    if n < 2:
        raise ValueError("the known-mean bound needs at least 2 observations")
    v = float(np.sum((values - means) ** 2))
    a1, _ = log_terms(n, alpha)
    var_term = math.sqrt(2.0 * v * a1)
    lin = linear_term(n, alpha, range_hi - range_lo)
    simplified = math.sqrt(2.0 * v * math.log(1.0 / alpha)) + math.sqrt(2.0 * v / (n - 1)) + lin
    return EBBound(
        deviation=var_term + lin,
        variance_term=var_term,
        linear_term=lin,
        alpha=alpha,
        n=n,
        variance_proxy=v,
        simplified=simplified,
    )
