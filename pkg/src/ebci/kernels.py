"""Compactly supported kernels, polynomial bases and population moment matrices.

All kernels live on ``[-1, 1]``. A kernel can be restricted to the one-sided
support ``[0, 1]`` to handle a left boundary point; right boundaries are
reduced to the left case by reflecting the covariate.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "KernelSpec",
    "MomentMatrices",
    "DensityKernel",
    "QuadratureError",
    "SingularMomentError",
    "eval_kernel",
    "poly_basis",
    "moment_matrix",
    "moment_matrices",
    "equivalent_kernel",
    "equivalent_kernel_l2",
    "density_kernel",
    "get_kernel",
]

QUAD_EPSABS = 1e-12
MAX_CONDITION = 1e12

INTERIOR = "interior"
BOUNDARY = "boundary"
_SUPPORTS = {INTERIOR: (-1.0, 1.0), BOUNDARY: (0.0, 1.0)}


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class SingularMomentError(np.linalg.LinAlgError):
    """A moment matrix is singular or too ill-conditioned to invert."""

    def __init__(self, message, min_eigenvalue=None, condition=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.condition = condition


def _epanechnikov(u):
    return 0.75 * (1.0 - u * u)


def _triangular(u):
    return 1.0 - np.abs(u)


def _uniform(u):
    return np.full_like(u, 0.5)


_FAMILIES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "epanechnikov": _epanechnikov,
    "triangular": _triangular,
    "uniform": _uniform,
}
# not Lipschitz at the support edges; kept out of theory-critical paths
_EXPERIMENTAL = {"uniform"}


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family together with its support.

    Parameters
    ----------
    name : str
        Kernel family, one of ``"epanechnikov"``, ``"triangular"`` or
        ``"uniform"``.
    support_kind : {"interior", "boundary"}
        ``"interior"`` evaluates on ``[-1, 1]``; ``"boundary"`` restricts the
        same profile to ``[0, 1]``.
    """

    name: str = "epanechnikov"
    support_kind: str = INTERIOR

    def __post_init__(self):
        if self.name not in _FAMILIES:
            raise ValueError(
                f"unknown kernel {self.name!r}; expected one of {sorted(_FAMILIES)}"
            )
        if self.support_kind not in _SUPPORTS:
            raise ValueError(
                f"support_kind must be 'interior' or 'boundary', got {self.support_kind!r}"
            )
        if self.name in _EXPERIMENTAL:
            warnings.warn(
                f"the {self.name} kernel is not Lipschitz on its support; "
                "coverage guarantees do not apply",
                UserWarning,
                stacklevel=3,
            )

    @property
    def support(self) -> tuple[float, float]:
        return _SUPPORTS[self.support_kind]

    @property
    def is_boundary(self) -> bool:
        return self.support_kind == BOUNDARY

    def interior(self) -> "KernelSpec":
        return self if not self.is_boundary else KernelSpec(self.name, INTERIOR)

    def boundary(self) -> "KernelSpec":
        return self if self.is_boundary else KernelSpec(self.name, BOUNDARY)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        lo, hi = self.support
        inside = (u >= lo) & (u <= hi)
        out = np.where(inside, _FAMILIES[self.name](np.where(inside, u, 0.0)), 0.0)
        return out if out.ndim else float(out)


def get_kernel(kernel="epanechnikov", boundary=None) -> KernelSpec:
    """Coerce a kernel name or :class:`KernelSpec` to a spec.

    ``boundary=None`` keeps the support of a given spec (names default to the
    interior support); ``True``/``False`` force the one- or two-sided support.
    """
    spec = kernel if isinstance(kernel, KernelSpec) else KernelSpec(str(kernel))
    if boundary is None:
        return spec
    return spec.boundary() if boundary else spec.interior()


def eval_kernel(spec: KernelSpec, u):
    """Evaluate ``K(u)``; zero outside the support."""
    return spec(u)


def poly_basis(u, S: int) -> np.ndarray:
    """Return ``(1, u, ..., u**S)`` along a new trailing axis."""
    if int(S) != S or S < 1:
        raise ValueError(f"polynomial order S must be a positive integer, got {S!r}")
    u = np.asarray(u, dtype=float)
    return u[..., None] ** np.arange(int(S) + 1)


@dataclass(frozen=True)
class MomentMatrices:
    """Population moment matrices of ``K`` and ``K**2`` against ``r(u) r(u)^T``."""

    S: int
    gamma1: np.ndarray = field(repr=False)
    gamma2: np.ndarray = field(repr=False)
    support_kind: str = INTERIOR

    def __post_init__(self):
        self.gamma1.setflags(write=False)
        self.gamma2.setflags(write=False)


def _quad(fun, lo, hi):
    # split at 0 so kinked profiles (triangular) integrate cleanly
    points = (0.0,) if lo < 0.0 < hi else None
    value, abserr, info = integrate.quad(
        fun, lo, hi, epsabs=QUAD_EPSABS, epsrel=0.0, limit=200, points=points,
        full_output=True,
    )[:3]
    if abserr > 10 * QUAD_EPSABS and info.get("last", 0) >= 200:
        raise QuadratureError(
            f"quadrature on [{lo}, {hi}] stopped with error estimate {abserr:.3g}"
        )
    return value


@lru_cache(maxsize=None)
def _moment_matrix_cached(spec: KernelSpec, S: int, power: int) -> np.ndarray:
    lo, hi = spec.support
    out = np.empty((S + 1, S + 1))
    # entry (i, j) depends only on i + j
    for total in range(2 * S + 1):
        value = _quad(lambda u: spec(u) ** power * u**total, lo, hi)
        for i in range(max(0, total - S), min(S, total) + 1):
            out[i, total - i] = value
    out.setflags(write=False)
    return out


def moment_matrix(spec: KernelSpec, S: int, power: int = 1) -> np.ndarray:
    """Integrate ``K(u)**power r(u) r(u)^T`` over the kernel support.

    Interior kernels give the usual interior matrices; boundary kernels give
    their one-sided counterparts over ``[0, 1]``.
    """
    poly_basis(0.0, S)  # validates S
    if power not in (1, 2):
        raise ValueError(f"power must be 1 or 2, got {power!r}")
    return _moment_matrix_cached(spec, int(S), int(power)).copy()


def moment_matrices(spec: KernelSpec, S: int) -> MomentMatrices:
    return MomentMatrices(
        S=int(S),
        gamma1=moment_matrix(spec, S, 1),
        gamma2=moment_matrix(spec, S, 2),
        support_kind=spec.support_kind,
    )


def _guarded_solve(matrix: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    eig = np.linalg.eigvalsh(matrix)
    cond = np.inf if eig[0] <= 0 else eig[-1] / eig[0]
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularMomentError(
            f"{what} is singular or ill-conditioned "
            f"(smallest eigenvalue {eig[0]:.3g}, condition {cond:.3g})",
            min_eigenvalue=float(eig[0]),
            condition=float(cond),
        )
    return np.linalg.solve(matrix, rhs)


@lru_cache(maxsize=None)
def _equivalent_coeffs(spec: KernelSpec, S: int) -> np.ndarray:
    gamma1 = _moment_matrix_cached(spec, S, 1)
    e0 = np.zeros(S + 1)
    e0[0] = 1.0
    coeffs = _guarded_solve(gamma1, e0, f"moment matrix (S={S}, {spec.support_kind})")
    coeffs.setflags(write=False)
    return coeffs


def equivalent_kernel(spec: KernelSpec, S: int) -> Callable:
    """Return ``u -> K(u) e0^T Gamma1^{-1} r(u)``, the limiting weight shape.

    For a boundary spec the one-sided matrix over ``[0, 1]`` is used.
    """
    poly_basis(0.0, S)
    coeffs = _equivalent_coeffs(spec, int(S))

    def l_S(u):
        u = np.asarray(u, dtype=float)
        out = spec(u) * (poly_basis(u, S) @ coeffs)
        return out if out.ndim else float(out)

    return l_S


def equivalent_kernel_l2(spec: KernelSpec, S: int) -> float:
    """``int l_S(u)**2 du``, computed as ``e0^T G1^{-1} G2 G1^{-1} e0``."""
    coeffs = _equivalent_coeffs(spec, int(S))
    return float(coeffs @ _moment_matrix_cached(spec, int(S), 2) @ coeffs)


@dataclass(frozen=True)
class DensityKernel:
    """Order-``S`` density kernel ``p(u) K(u)`` with ``p`` a degree-``S`` polynomial.

    ``coeffs`` holds the coefficients of ``p`` in the monomial basis, chosen so
    that the kernel integrates to one and its moments of order ``1..S`` vanish.
    """

    base: KernelSpec
    S: int
    coeffs: tuple

    @property
    def support_kind(self) -> str:
        return self.base.support_kind

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = self.base(u) * (poly_basis(u, self.S) @ np.asarray(self.coeffs))
        return out if out.ndim else float(out)

    def l2(self) -> float:
        """``int K_I(u)**2 du`` over the support."""
        return equivalent_kernel_l2(self.base, self.S)


def density_kernel(base: KernelSpec | str, S: int, support_kind: str = INTERIOR) -> DensityKernel:
    """Build the order-``S`` density kernel for the given support.

    The moment conditions ``int u^k p(u) K(u) du = delta_{k0}`` for ``k = 0..S``
    form the linear system ``Gamma1 c = e0``.
    """
    poly_basis(0.0, S)
    spec = get_kernel(base, boundary=(support_kind == BOUNDARY))
    coeffs = _equivalent_coeffs(spec, int(S))
    return DensityKernel(base=spec, S=int(S), coeffs=tuple(float(c) for c in coeffs))
