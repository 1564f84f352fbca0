"""Monte Carlo engine for coverage, width and bias of interval methods."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .. import baselines
from ..bandwidth import naive_bandwidth
from ..intervals import (
    EtaFreePolicy,
    ebci_density_eta_free,
    ebci_density_fixed_eta,
    ebci_regression_eta_free,
    ebci_regression_fixed_eta,
    kde_at,
    resolve_boundary,
)
from ..kernels import BOUNDARY, INTERIOR, density_kernel, equivalent_kernel_l2, get_kernel
from ..lpreg import InsufficientLocalData, lp_fit
from ..variance import variance_proxy_density, variance_proxy_regression
from .dgp import CuspParams, UniformDensity, ccf_mean, cusp_mean, gen_ccf, gen_cusp
from .rng import replication_rng

__all__ = [
    "SimConfig",
    "SimSummary",
    "run_mc",
    "replicate",
    "resolve_workers",
    "config_from_dict",
    "with_method",
    "METHODS",
    "DGPS",
]

METHODS = ("ebci_eta_free", "ebci_fixed_eta", "snc", "flci_oracle")
DGPS = ("cusp", "ccf", "uniform_density")
MAX_FAILURE_RATE = 0.01
THREADS_ENV = "EBCI_THREADS"


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo cell.

    Parameters
    ----------
    dgp : {"cusp", "ccf", "uniform_density"}
    n : int
    alpha : float
    method : {"ebci_eta_free", "ebci_fixed_eta", "snc", "flci_oracle"}
    side : {"two", "upper", "lower"}
    x0 : float
    B : int
        Number of replications.
    seed : int
    S : int
        Assumed smoothness order of the interval method.
    delta, error_kind, support
        Cusp DGP settings; ``support`` also picks the design for
        ``uniform_density`` (``[-1, 1]`` or ``[0, 1]``).
    eta : float, optional
        Bias budget, required by ``ebci_fixed_eta`` and ``flci_oracle``.
    tau : float
        Exponent of ``d_n = n**tau`` for the eta-free interval.
    boundary : {"interior", "left", "right", "auto"}, optional
        Defaults to ``left`` for the cusp and density DGPs on ``[0, 1]``,
        to ``left``/``right`` for CCF at ``x0 = -1``/``1``, else ``interior``.
    unified_calibration : bool, optional
        Defaults to True, which calibrates two-sided interior eta-free
        intervals at ``t = alpha``. Boundary intervals always use ``alpha/2``.
    """

    dgp: str = "cusp"
    n: int = 1000
    alpha: float = 0.05
    method: str = "ebci_eta_free"
    side: str = "two"
    x0: float = 0.0
    B: int = 2000
    seed: int = 0
    S: int = 3
    delta: float = 1.0
    error_kind: str = "normal"
    support: str = "interior"
    eta: float | None = None
    tau: float = 0.001
    boundary: str | None = None
    unified_calibration: bool | None = None

    def __post_init__(self):
        if self.dgp not in DGPS:
            raise ValueError(f"dgp must be one of {DGPS}, got {self.dgp!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.B < 1:
            raise ValueError(f"B must be at least 1, got {self.B}")
        if self.n < 4:
            raise ValueError(f"n must be at least 4, got {self.n}")
        if self.method in ("ebci_fixed_eta", "flci_oracle") and self.eta is None:
            raise ValueError(f"method {self.method!r} needs eta")
        if self.dgp == "cusp":
            self.cusp_params()

    def cusp_params(self) -> CuspParams:
        return CuspParams(delta=self.delta, error_kind=self.error_kind, support=self.support)

    @property
    def boundary_flag(self) -> str:
        if self.boundary is not None:
            return self.boundary
        if self.dgp == "ccf":
            if self.x0 <= -1.0:
                return "left"
            return "right" if self.x0 >= 1.0 else "interior"
        return "left" if self.support == "boundary" else "interior"

    @property
    def theta(self) -> float:
        if self.dgp == "cusp":
            return float(cusp_mean(self.x0, self.cusp_params()))
        if self.dgp == "ccf":
            return float(ccf_mean(self.x0))
        return self.density().pdf(self.x0)

    def density(self) -> UniformDensity:
        return UniformDensity(0.0, 1.0) if self.support == "boundary" else UniformDensity(-1.0, 1.0)

    @property
    def is_density(self) -> bool:
        return self.dgp == "uniform_density"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SimSummary:
    config: SimConfig
    coverage: float
    mean_width: float
    mean_bias: float
    mean_h: float
    B_effective: int
    failures: int
    valid: bool
    widths: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def coverage_se(self) -> float:
        if self.B_effective == 0:
            return math.nan
        return math.sqrt(self.coverage * (1 - self.coverage) / self.B_effective)

    @property
    def median_width(self) -> float:
        return float(np.median(self.widths)) if self.widths is not None and self.widths.size else math.nan


def _draw(config: SimConfig, rep: int):
    rng = replication_rng(config.seed, rep)
    if config.dgp == "cusp":
        return gen_cusp(config.cusp_params(), config.n, rng)
    if config.dgp == "ccf":
        return gen_ccf(config.n, rng)
    return config.density().sample(config.n, rng)


def _endpoints(center, radius, side):
    if side == "two":
        return center - radius, center + radius
    if side == "upper":
        return -math.inf, center + radius
    return center - radius, math.inf


def _design_density(config: SimConfig) -> float:
    if config.dgp == "cusp":
        return config.cusp_params().design_density
    return 0.5


def _snc(config, data, case):
    n, S = config.n, config.S
    h = naive_bandwidth(n, S)
    z = float(baselines.normal_quantile(1 - (config.alpha / 2 if config.side == "two" else config.alpha)))
    if config.is_density:
        xs = -data if case == "right" else data
        x0 = -config.x0 if case == "right" else config.x0
        dk = density_kernel("epanechnikov", S, BOUNDARY if case != "interior" else INTERIOR)
        proxy = variance_proxy_density(xs, S, dk, x0).value
        center = kde_at(xs, x0, h, dk)
    else:
        smp = data.reflected() if case == "right" else data
        x0 = -config.x0 if case == "right" else config.x0
        spec = get_kernel("epanechnikov", boundary=case != "interior")
        proxy = variance_proxy_regression(smp, S, spec.name, x0=x0, boundary=case != "interior").value
        center = lp_fit(smp, x0, h, S, spec)
    return center, z * math.sqrt(proxy / (n * h)), h


def _flci_oracle(config, data, case):
    n, S = config.n, config.S
    spec = get_kernel("epanechnikov", boundary=case != "interior")
    side = "two" if config.side == "two" else "one"
    x0 = -config.x0 if case == "right" else config.x0
    if config.is_density:
        f0 = config.density().pdf(config.x0)
        cv = f0 * equivalent_kernel_l2(spec, S)
        radius, h, _ = baselines.flci_optimized_radius(config.eta, cv, n, S, config.alpha, side)
        xs = -data if case == "right" else data
        dk = density_kernel(spec.name, S, spec.support_kind)
        center = kde_at(xs, x0, h, dk)
    else:
        cv = equivalent_kernel_l2(spec, S) / _design_density(config)
        radius, h, _ = baselines.flci_optimized_radius(config.eta, cv, n, S, config.alpha, side)
        smp = data.reflected() if case == "right" else data
        center = lp_fit(smp, x0, h, S, spec)
    return center, radius, h


def replicate(config: SimConfig, rep: int):
    """Run one replication; return ``(covered, width, bias, h)``."""
    data = _draw(config, rep)
    xs = data if config.is_density else data.xs
    case = resolve_boundary(config.boundary_flag, xs, config.x0, naive_bandwidth(config.n, config.S))
    common = dict(x0=config.x0, S=config.S, alpha=config.alpha, side=config.side, boundary=case)
    if config.method == "ebci_eta_free":
        policy = EtaFreePolicy("power", config.tau)
        if config.is_density:
            res = ebci_density_eta_free(data, policy=policy, **common)
        else:
            unified = config.unified_calibration
            unified = (case == "interior") if unified is None else (unified and case == "interior")
            res = ebci_regression_eta_free(data, policy=policy, unified_calibration=unified, **common)
        center, radius, h = res.center, res.radius, res.h_used
    elif config.method == "ebci_fixed_eta":
        fn = ebci_density_fixed_eta if config.is_density else ebci_regression_fixed_eta
        res = fn(data, eta=config.eta, **common)
        center, radius, h = res.center, res.radius, res.h_used
    elif config.method == "snc":
        center, radius, h = _snc(config, data, case)
    else:
        center, radius, h = _flci_oracle(config, data, case)
    lower, upper = _endpoints(center, radius, config.side)
    theta = config.theta
    width = 2.0 * radius if config.side == "two" else radius
    return float(lower <= theta <= upper), width, center - theta, h


_RECOVERABLE = (InsufficientLocalData, np.linalg.LinAlgError, ValueError, ArithmeticError)


def _run_chunk(config: SimConfig, start: int, stop: int):
    out = np.full((stop - start, 4), np.nan)
    for i, rep in enumerate(range(start, stop)):
        try:
            out[i] = replicate(config, rep)
        except _RECOVERABLE:
            pass
    return out


def resolve_workers(requested: int | None = None) -> int:
    """Worker count: ``requested`` (default: CPU count), capped by ``$EBCI_THREADS``."""
    workers = (os.cpu_count() or 1) if requested is None else int(requested)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if cap < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        workers = min(workers, cap)
    return workers


def run_mc(config: SimConfig, workers: int | None = None, chunk_size: int = 250) -> SimSummary:
    """Run ``config.B`` replications and aggregate them.

    Replications are split into contiguous chunks, evaluated in a process pool
    when more than one worker is available, and reassembled in replication
    order before averaging, so the summary is bit-identical for any worker
    count. Replications that raise a numerical error are counted as failures;
    more than 1% failures marks the summary invalid.
    """
    workers = min(resolve_workers(workers), max(1, math.ceil(config.B / chunk_size)))
    bounds = [(s, min(s + chunk_size, config.B)) for s in range(0, config.B, chunk_size)]
    if workers == 1:
        parts = [_run_chunk(config, s, e) for s, e in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, config, s, e) for s, e in bounds]
            parts = [f.result() for f in futures]
    table = np.vstack(parts)
    ok = ~np.isnan(table[:, 0])
    good = table[ok]
    failures = int(config.B - good.shape[0])
    if good.shape[0]:
        coverage, width, bias, h = (float(np.mean(good[:, j])) for j in range(4))
    else:
        coverage = width = bias = h = math.nan
    return SimSummary(
        config=config,
        coverage=coverage,
        mean_width=width,
        mean_bias=bias,
        mean_h=h,
        B_effective=int(good.shape[0]),
        failures=failures,
        valid=failures <= MAX_FAILURE_RATE * config.B and good.shape[0] > 0,
        widths=good[:, 1].copy(),
    )


def config_from_dict(doc: dict) -> SimConfig:
    """Build a :class:`SimConfig` from a mapping with snake_case keys."""
    known = {f.name for f in fields(SimConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return SimConfig(**doc)


def with_method(config: SimConfig, method: str, **changes) -> SimConfig:
    return replace(config, method=method, **changes)
