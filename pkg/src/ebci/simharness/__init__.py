"""Monte Carlo harness: data-generating processes, replication engine and emitters."""
from .config import CONFIG_SCHEMA, ConfigError, bundled_config_names, expand_config, load_config
from .dgp import CuspParams, UniformDensity, ccf_mean, cusp_mean, gen_ccf, gen_cusp, skewed_errors
from .emit import (
    COLUMNS,
    PlotData,
    ResultRow,
    emit_plot,
    emit_results,
    load_reference,
    parse_results,
    plot_data,
    reference_for,
    reference_key,
)
from .mc import DGPS, METHODS, SimConfig, SimSummary, config_from_dict, replicate, resolve_workers, run_mc
from .rng import replication_rng

__all__ = [
    "CONFIG_SCHEMA",
    "ConfigError",
    "bundled_config_names",
    "expand_config",
    "load_config",
    "CuspParams",
    "UniformDensity",
    "ccf_mean",
    "cusp_mean",
    "gen_ccf",
    "gen_cusp",
    "skewed_errors",
    "COLUMNS",
    "PlotData",
    "ResultRow",
    "emit_plot",
    "emit_results",
    "load_reference",
    "parse_results",
    "plot_data",
    "reference_for",
    "reference_key",
    "DGPS",
    "METHODS",
    "SimConfig",
    "SimSummary",
    "config_from_dict",
    "replicate",
    "resolve_workers",
    "run_mc",
    "replication_rng",
]
