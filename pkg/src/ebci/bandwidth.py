"""Oracle and plug-in bandwidths and the finite-grid bandwidth selector."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BandwidthGrid",
    "BandwidthClampWarning",
    "build_grid",
    "naive_bandwidth",
    "plugin_bandwidth",
    "oracle_bandwidth",
    "project_to_grid",
]


class BandwidthClampWarning(UserWarning):
    """The plug-in bandwidth fell outside the candidate grid and was clamped."""


@dataclass(frozen=True)
class BandwidthGrid:
    """Candidate set ``{j * n**(-1/(2S+1)) / (log n)**3 : 1 <= j <= floor((log n)**4)}``."""

    n: int
    S: int
    spacing: float
    count: int
    points: np.ndarray = field(repr=False)

    def __contains__(self, h) -> bool:
        return bool(np.any(self.points == h))


def naive_bandwidth(n: int, S: int) -> float:
    """Rate-optimal deterministic bandwidth ``n**(-1/(2S+1))``."""
    return n ** (-1.0 / (2 * S + 1))


def build_grid(n: int, S: int) -> BandwidthGrid:
    if n < 3:
        raise ValueError(f"the bandwidth grid needs n >= 3 (log n > 1), got n={n}")
    if S < 1:
        raise ValueError(f"S must be a positive integer, got {S!r}")
    log_n = math.log(n)
    spacing = naive_bandwidth(n, S) / log_n**3
    count = math.floor(log_n**4)
    points = spacing * np.arange(1, count + 1)
    points.setflags(write=False)
    return BandwidthGrid(n=int(n), S=int(S), spacing=spacing, count=count, points=points)


def _check_rate_inputs(cv, t, S, eta, n):
    if not (0.0 < t < 1.0):
        raise ValueError(f"t must lie in (0, 1), got {t!r}")
    if cv < 0 or eta <= 0 or n < 1 or S < 1:
        raise ValueError(
            f"need cv >= 0, eta > 0, n >= 1, S >= 1; got cv={cv}, eta={eta}, n={n}, S={S}"
        )


def plugin_bandwidth(cv_hat: float, t: float, S: int, eta: float, n: int) -> float:
    """``(2 log(1/t) cv_hat / (4 S**2 eta**2 n))**(1/(2S+1))``.

    ``t`` is ``alpha`` for one-sided intervals and ``alpha/2`` for two-sided.
    """
    _check_rate_inputs(cv_hat, t, S, eta, n)
    return (2.0 * math.log(1.0 / t) * cv_hat / (4.0 * S * S * eta * eta * n)) ** (1.0 / (2 * S + 1))


def oracle_bandwidth(cv: float, alpha: float, S: int, eta: float, n: int) -> float:
    """Minimiser of ``sqrt(2 cv log(1/alpha) / (n h)) + eta h**S`` over ``h > 0``."""
    return plugin_bandwidth(cv, alpha, S, eta, n)


def project_to_grid(h_hat: float, grid: BandwidthGrid) -> float:
    """Nearest grid point to ``h_hat``; ties go to the smaller point.

    Values beyond the top of the grid are clamped with a
    :class:`BandwidthClampWarning`.
    """
    if grid.count < 1:
        raise ValueError("empty bandwidth grid")
    points = grid.points
    if h_hat > points[-1]:
        warnings.warn(
            f"plug-in bandwidth {h_hat:.4g} exceeds the largest grid point "
            f"{points[-1]:.4g}; using the largest point",
            BandwidthClampWarning,
            stacklevel=2,
        )
        return float(points[-1])
    dist = np.abs(points - h_hat)
    best = dist.min()
    # midpoints land on either side of exact equality in floating point
    ties = np.flatnonzero(dist <= best + 1e-12 * max(grid.spacing, abs(h_hat)))
    return float(points[ties[0]])
