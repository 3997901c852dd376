"""Monotone mean-value scheme laboratory."""

import json

from ._mvscheme import (
    ConfigError,
    GeometryError,
    InvariantError,
    OperatorSpec,
    TestFunction,
    eval_mean,
    eval_scheme,
    fit_rate,
    frac_barrier_constant,
    frac_laplacian_constant,
    implicit_p_moment_constant,
    solve_implicit_root,
)
from . import _mvscheme

__all__ = [
    "ConfigError",
    "GeometryError",
    "InvariantError",
    "OperatorSpec",
    "TestFunction",
    "eval_mean",
    "eval_scheme",
    "fit_rate",
    "frac_barrier_constant",
    "frac_laplacian_constant",
    "implicit_p_moment_constant",
    "solve_implicit_root",
    "test_function",
    "run",
]


def test_function(spec, dim):
    return TestFunction.from_json(json.dumps(spec), dim)


def run(config, strict=False):
    """Run an experiment config (dict). Returns (status, report dict, csv text)."""
    status, report, csv = _mvscheme.run_json(json.dumps(config), strict)
    return status, json.loads(report), csv
