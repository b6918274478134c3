"""Matching-function estimation from market counts."""

from ._core import (
    ConditionalCdf,
    EstimationError,
    IoError,
    ValidationError,
    estimate,
    isotonic_fit,
    lasso_fit,
    load_panel,
    run_cli,
    simulate,
    within_area_share,
)

__all__ = [
    "ConditionalCdf",
    "EstimationError",
    "IoError",
    "ValidationError",
    "estimate",
    "isotonic_fit",
    "lasso_fit",
    "load_panel",
    "run_cli",
    "simulate",
    "within_area_share",
]
