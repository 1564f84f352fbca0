"""Empirical Bernstein confidence intervals for local polynomial regression
and kernel density estimation at a point."""
from .bandwidth import BandwidthGrid, build_grid, oracle_bandwidth, plugin_bandwidth, project_to_grid
from .estimators import EBCIDensity, EBCIRegressor
from .concentration import EBBound, eb_bound_known_mean, eb_bound_paired
from .intervals import (
    EtaFreePolicy,
    IntervalResult,
    ebci_density_eta_free,
    ebci_density_fixed_eta,
    ebci_regression_eta_free,
    ebci_regression_fixed_eta,
    radius_eta_free,
    radius_fixed_eta,
)
from .kernels import KernelSpec, density_kernel, equivalent_kernel, get_kernel, moment_matrix
from .lpreg import InsufficientLocalData, Sample, lp_fit, lp_weights
from .variance import VarianceProxy, variance_proxy_density, variance_proxy_regression

__version__ = "0.1.0"

__all__ = [
    "EBCIRegressor",
    "EBCIDensity",
    "BandwidthGrid",
    "build_grid",
    "oracle_bandwidth",
    "plugin_bandwidth",
    "project_to_grid",
    "EBBound",
    "eb_bound_known_mean",
    "eb_bound_paired",
    "EtaFreePolicy",
    "IntervalResult",
    "ebci_density_eta_free",
    "ebci_density_fixed_eta",
    "ebci_regression_eta_free",
    "ebci_regression_fixed_eta",
    "radius_eta_free",
    "radius_fixed_eta",
    "KernelSpec",
    "density_kernel",
    "equivalent_kernel",
    "get_kernel",
    "moment_matrix",
    "InsufficientLocalData",
    "Sample",
    "lp_fit",
    "lp_weights",
    "VarianceProxy",
    "variance_proxy_density",
    "variance_proxy_regression",
]
