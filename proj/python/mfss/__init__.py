"""Simulation smoothing for mixed-frequency VARs."""

from ._core import (
    ConfigError,
    Error,
    FormulationError,
    InitializationError,
    IoError,
    Model,
    OracleTooLargeError,
    PatternError,
    SingularInnovationError,
    VarParams,
    backends,
    derive_seed,
    flop_count,
    mult_count,
    random_var,
    simulate,
)

__all__ = [
    "ConfigError",
    "Error",
    "FormulationError",
    "InitializationError",
    "IoError",
    "Model",
    "OracleTooLargeError",
    "PatternError",
    "SingularInnovationError",
    "VarParams",
    "backends",
    "derive_seed",
    "flop_count",
    "mult_count",
    "random_var",
    "simulate",
]
