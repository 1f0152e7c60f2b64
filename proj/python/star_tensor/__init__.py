"""Sparse tensor additive regression."""

from ._core import (
    ConfigError,
    DataError,
    Model,
    basis_values,
    cross_validate,
    fit,
    fit_tlr,
    lambda_max,
    load_dataset,
    mse,
    save_dataset,
    sensitivity,
    simulate,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Model",
    "basis_values",
    "cross_validate",
    "fit",
    "fit_tlr",
    "lambda_max",
    "load_dataset",
    "mse",
    "save_dataset",
    "sensitivity",
    "simulate",
]
