"""Nash equilibria of networked Cournot competition."""

import json
import os

from ._core import CournotError, generate_json, revenue_margin, solve_oligopoly, solve_json, verify_json

__all__ = ["CournotError", "generate", "revenue_margin", "solve", "solve_oligopoly", "verify"]


def _scenario_text(scenario):
    if isinstance(scenario, dict):
        return json.dumps(scenario)
    if isinstance(scenario, (str, os.PathLike)) and os.path.exists(scenario):
        with open(scenario, encoding="utf-8") as fh:
            return fh.read()
    return str(scenario)


def solve(scenario, method="auto", tol=None, max_iters=None):
    """Solve a scenario (dict, path or JSON text); returns the report as a dict."""
    return json.loads(solve_json(_scenario_text(scenario), method, tol, max_iters))


def verify(scenario, quantities, tol=1e-6):
    return json.loads(verify_json(_scenario_text(scenario), [float(q) for q in quantities], tol))


def generate(seed=1, firms=2, markets=2, density=1.0, family="linear", integral=False):
    return json.loads(generate_json(seed, firms, markets, density, family, integral))
