"""Data-generating processes for the Monte Carlo experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..lpreg import Sample

__all__ = [
    "CuspParams",
    "cusp_mean",
    "gen_cusp",
    "ccf_mean",
    "gen_ccf",
    "UniformDensity",
    "skewed_errors",
    "SUPPORTS",
]

SUPPORTS = {"interior": (-1.0, 1.0), "boundary": (0.0, 1.0)}
ERROR_KINDS = ("normal", "skewed_gamma")


@dataclass(frozen=True)
class CuspParams:
    """Polynomial with a one-sided cusp ``d * max(x, 0)**(S + delta)``.

    ``m(x) = sum_j a_j x**j + d * max(x, 0)**(S + delta) + c``, so
    ``m(0) = c`` and the smoothness sits just above order ``S`` as
    ``delta`` shrinks.
    """

    delta: float = 1.0
    error_kind: str = "normal"
    support: str = "interior"
    S: int = 3
    coeffs: tuple = (1.0, 2.0, 4.0)
    intercept: float = 1.0
    amplitude: float = 24.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta!r}")
        if self.error_kind not in ERROR_KINDS:
            raise ValueError(f"error_kind must be one of {ERROR_KINDS}, got {self.error_kind!r}")
        if self.support not in SUPPORTS:
            raise ValueError(f"support must be one of {tuple(SUPPORTS)}, got {self.support!r}")
        object.__setattr__(self, "coeffs", tuple(float(a) for a in self.coeffs))

    @property
    def design_density(self) -> float:
        lo, hi = SUPPORTS[self.support]
        return 1.0 / (hi - lo)


def cusp_mean(x, params: CuspParams):
    x = np.asarray(x, dtype=float)
    out = np.full_like(x, params.intercept)
    for j, a in enumerate(params.coeffs, start=1):
        out = out + a * x**j
    out = out + params.amplitude * np.maximum(x, 0.0) ** (params.S + params.delta)
    return out if out.ndim else float(out)


def skewed_errors(rng: np.random.Generator, n: int) -> np.ndarray:
    """Centred, unit-variance Gamma(2, 1) errors ``(Z - 2) / sqrt(2)``.

    ``Z`` is drawn as the sum of two unit exponentials ``-log U1 - log U2``.
    """
    u = rng.random((2, n))
    z = -np.log1p(-u[0]) - np.log1p(-u[1])
    return (z - 2.0) / math.sqrt(2.0)


def _errors(rng, n, kind):
    if kind == "normal":
        return rng.standard_normal(n)
    return skewed_errors(rng, n)


def gen_cusp(params: CuspParams, n: int, rng: np.random.Generator) -> Sample:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    lo, hi = SUPPORTS[params.support]
    xs = rng.uniform(lo, hi, n)
    ys = cusp_mean(xs, params) + _errors(rng, n, params.error_kind)
    return Sample(xs, ys)


def ccf_mean(x):
    """``sin(3 pi x / 2) / (1 + 18 x**2 (sign(x) + 1))``."""
    x = np.asarray(x, dtype=float)
    out = np.sin(1.5 * np.pi * x) / (1.0 + 18.0 * x**2 * (np.sign(x) + 1.0))
    return out if out.ndim else float(out)


def gen_ccf(n: int, rng: np.random.Generator) -> Sample:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    xs = rng.uniform(-1.0, 1.0, n)
    return Sample(xs, ccf_mean(xs) + rng.standard_normal(n))


@dataclass(frozen=True)
class UniformDensity:
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"empty support [{self.lo}, {self.hi}]")

    def pdf(self, x: float) -> float:
        return 1.0 / (self.hi - self.lo) if self.lo <= x <= self.hi else 0.0

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, n)
