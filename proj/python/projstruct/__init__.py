"""Projection-structure selection, empirical Bayes posteriors and confidence balls."""

from ._core import (
    CapExceeded,
    ConfigError,
    ContractError,
    Error,
    Family,
    Unsupported,
    __version__,
    config_hash,
    constants,
    ebr_radius_sq,
    oracle_rate,
    posterior,
    quarter_radius_sq,
    run_check,
    run_select,
    run_simulate,
    select,
    sparsity_inclusion_probabilities,
    sparsity_log_normalizer,
)

__all__ = [
    "CapExceeded",
    "ConfigError",
    "ContractError",
    "Error",
    "Family",
    "Unsupported",
    "__version__",
    "config_hash",
    "constants",
    "ebr_radius_sq",
    "oracle_rate",
    "posterior",
    "quarter_radius_sq",
    "run_check",
    "run_select",
    "run_simulate",
    "select",
    "sparsity_inclusion_probabilities",
    "sparsity_log_normalizer",
]
