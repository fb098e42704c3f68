"""Fractional Helmholtz pseudospectral laboratory."""

import json as _json

from ._fhelm import (  # noqa: F401
    ConfigError,
    ConvergenceError,
    DomainError,
    DualProblem,
    GeometryError,
    Grid,
    InconsistencyError,
    UsageError,
    apply_forward_operator,
    apply_resolvent,
    eps_floor,
    experiments,
    green_classical,
    hankel1,
    lp_norm,
    read_snapshot,
    tau_alpha,
    thm1_admissible,
    thm3_q_window,
)
from ._fhelm import run_config as _run_config


def run(config, out_dir=""):
    """Run one experiment from a config dict; returns (exit_code, message, summary dict)."""
    code, message, summary = _run_config(_json.dumps(config), str(out_dir))
    return code, message, _json.loads(summary)
