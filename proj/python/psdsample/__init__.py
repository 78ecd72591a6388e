"""Sampling from Gaussian PSD models."""

from ._core import (
    GaussianPsdModel,
    NumericalError,
    RankOneModel,
    ResourceError,
    adaptive_rho,
    derive_seed,
    empirical_mmd,
    exact_distances,
    fit_psd,
    fit_rank_one,
    grid_sample,
    integrate,
    load_model,
    sample,
    save_model,
)

__all__ = [
    "GaussianPsdModel",
    "NumericalError",
    "RankOneModel",
    "ResourceError",
    "adaptive_rho",
    "derive_seed",
    "empirical_mmd",
    "exact_distances",
    "fit_psd",
    "fit_rank_one",
    "grid_sample",
    "integrate",
    "load_model",
    "sample",
    "save_model",
]
