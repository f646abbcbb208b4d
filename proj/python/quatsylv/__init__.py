"""Quaternion tensor algebra and coupled two-sided Sylvester-like system solvers.

Thin convenience layer over the compiled module: the solver entry points
exchange the same JSON documents the command-line tool reads and writes.
"""

import json

from ._core import (  # noqa: F401
    QTensor,
    conj_transpose,
    einstein_product,
    eta_conj_transpose,
    identity,
    left_projector,
    pinv,
    right_projector,
    zeros,
)
from . import _core

__all__ = [
    "QTensor",
    "check",
    "conj_transpose",
    "einstein_product",
    "eta_conj_transpose",
    "fixture",
    "generate",
    "identity",
    "left_projector",
    "pinv",
    "right_projector",
    "solve",
    "verify",
    "zeros",
]


def check(spec, tol_rank=1e-12, tol_cond=1e-9):
    """Evaluate the consistency conditions of a spec dict; returns the report dict."""
    return json.loads(_core.check_json(json.dumps(spec), tol_rank, tol_cond))


def solve(spec, policy="zero", seed=0, tol_rank=1e-12, tol_cond=1e-9):
    """Solve a spec dict.  Returns {"report": ..., "solution": ...}; the
    solution key is absent when the system is inconsistent."""
    return json.loads(_core.solve_json(json.dumps(spec), policy, seed, tol_rank, tol_cond))


def verify(spec, solution, tol_cond=1e-9):
    """Substitute a solution dict into a spec dict; returns the residual report."""
    return json.loads(_core.verify_json(json.dumps(spec), json.dumps(solution), tol_cond))


def generate(variant, seed, dim=2, order=2, eta="i"):
    """Forward-built consistent instance: returns {"spec": ..., "solution": ...}."""
    return json.loads(_core.generate_json(variant, seed, dim, order, eta))


def fixture(fixture_id="example-3.3"):
    """A bundled golden fixture: returns {"spec": ..., "solution": ...}."""
    return json.loads(_core.fixture_json(fixture_id))
