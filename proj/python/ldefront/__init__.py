"""Traveling-wave fronts of unidirectional lattice equations."""

from ._core import (
    Classification,
    ComputationError,
    Expr,
    Model,
    ParseError,
    catalog,
    catalog_names,
    check_hypotheses,
    classify,
    critical_speed,
    find_c_f,
    find_c_m,
    lattice_speed,
    load_model_file,
    parse_model_config,
    profile,
    real_roots,
    scan,
    stability_threshold,
)

__all__ = [
    "Classification",
    "ComputationError",
    "Expr",
    "Model",
    "ParseError",
    "catalog",
    "catalog_names",
    "check_hypotheses",
    "classify",
    "critical_speed",
    "find_c_f",
    "find_c_m",
    "lattice_speed",
    "load_model_file",
    "parse_model_config",
    "profile",
    "real_roots",
    "scan",
    "stability_threshold",
]
