"""Linear beamformer design for coherent-MAC sensor networks."""

import json as _json

from ._sensorbf import (
    ConfigError,
    DimensionError,
    DomainError,
    NetworkModel,
    NumericalError,
    PreconditionError,
    closed_form_state,
    derive_seed,
    kkt_residual,
    mi_gradient,
    mutual_information,
    random_baseline_mi,
    random_feasible_initial,
    run_batch_bca,
    run_cyclic_bca,
    run_verify_suite,
    solve_trs,
    surrogate_objective,
    transmit_power,
)
from . import _sensorbf

__all__ = [
    "ConfigError",
    "DimensionError",
    "DomainError",
    "NetworkModel",
    "NumericalError",
    "PreconditionError",
    "build_model",
    "closed_form_state",
    "derive_seed",
    "kkt_residual",
    "mi_gradient",
    "mutual_information",
    "normalize_config",
    "random_baseline_mi",
    "random_feasible_initial",
    "run_batch_bca",
    "run_cyclic_bca",
    "run_experiment",
    "run_verify_suite",
    "solve_trs",
    "surrogate_objective",
    "transmit_power",
]


def _dump(config):
    return config if isinstance(config, str) else _json.dumps(config)


def normalize_config(config):
    """Scenario dict with every field filled in and validated."""
    return _json.loads(_sensorbf.normalize_config(_dump(config)))


def build_model(config, realization_seed, snr_db=None):
    return _sensorbf.build_model(_dump(config), realization_seed, snr_db)


def run_experiment(config, threads=0):
    """Runs the Monte-Carlo scenario and returns the result document as a dict."""
    return _json.loads(_sensorbf.run_experiment_json(_dump(config), threads))
