"""Damped first-order iteration for Gaussian linear models.

The compiled extension provides the model, the iteration, convergence
certificates and the MIMO-OFDM builders; this package adds JSON-friendly
wrappers around the experiment harness.
"""

import json
import os

from . import _siga
from ._siga import (
    ConvergenceCertificate,
    DampingBounds,
    DimensionError,
    DomainError,
    FixedPointData,
    GaussianLinearModel,
    NonConvergenceError,
    NumericalError,
    PosteriorExact,
    SigaResult,
    SigaStatus,
    certify,
    damping_bounds,
    exact_posterior,
    load_model,
    make_general_random_model,
    mimo,
    nu_fixed_point,
    nu_lower_bound,
    nu_step,
    random_unit_magnitude_matrix,
    rho_shift,
    run,
    save_model,
    theta_step,
    validate_model,
)


def run_experiment(spec, base_dir=None):
    """Run an experiment given a spec dict or a path to a spec file; returns the manifest dict."""
    if isinstance(spec, (str, os.PathLike)):
        path = os.fspath(spec)
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
        if base_dir is None:
            base_dir = os.path.dirname(os.path.abspath(path))
    return json.loads(_siga.harness._run_experiment_json(json.dumps(spec), base_dir or ""))


def list_scenarios():
    return json.loads(_siga.harness._list_scenarios_json())


__all__ = [name for name in dir() if not name.startswith("_") and name not in ("json", "os")]
