"""Dual-drive substrate simulation and nonlinear time-series readout."""

from ._core import (
    ArgumentError,
    DataError,
    Error,
    NumericalError,
    SubstrateParams,
    adf_test,
    analyze,
    approximate_entropy,
    default_params,
    dfa_alpha,
    katz_fd,
    load_params,
    mix,
    normalize,
    permutation_entropy,
    petrosian_fd,
    repetend_length,
    run_pipeline,
    sample_entropy,
    save_params,
    select_embedding,
    simulate,
    synthesize,
)

__all__ = [
    "ArgumentError",
    "DataError",
    "Error",
    "NumericalError",
    "SubstrateParams",
    "adf_test",
    "analyze",
    "approximate_entropy",
    "default_params",
    "dfa_alpha",
    "katz_fd",
    "load_params",
    "mix",
    "normalize",
    "permutation_entropy",
    "petrosian_fd",
    "repetend_length",
    "run_pipeline",
    "sample_entropy",
    "save_params",
    "select_embedding",
    "simulate",
    "synthesize",
]
