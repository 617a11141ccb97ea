"""Contextual-bandit reductions with regression oracles."""

import json as _json

from ._core import (
    ConfigError,
    ContractViolation,
    HedgedTsallisInf,
    RngStream,
    affine_dimension,
    check,
    eta_rounding_check,
    igw,
    log_barrier,
    logdet_barrier,
    minimax_value,
    round_rows,
    tsallis_solve,
)
from ._core import run as _run


def run(config):
    """Run an experiment from a dict (or JSON text); returns the summary dict."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_run(text))


__all__ = [
    "ConfigError",
    "ContractViolation",
    "HedgedTsallisInf",
    "RngStream",
    "affine_dimension",
    "check",
    "eta_rounding_check",
    "igw",
    "log_barrier",
    "logdet_barrier",
    "minimax_value",
    "round_rows",
    "run",
    "tsallis_solve",
]
