"""Feasibility engines and the decay-rate bisection.

Names are resolved lazily so that :mod:`soficlyap.templates` can use the
eigensolver without importing the bisection driver (which needs templates).
"""

import importlib

_EXPORTS = {
    "BisectionReport": "bisect", "check_gamma": "bisect", "rho_upper": "bisect",
    "symmetric_eigen": "eigen",
    "CutPool": "lmi", "LMIResult": "lmi", "lmi_feasible": "lmi",
    "IncrementalLP": "lp", "LPProblem": "lp", "LPResult": "lp", "lp_solve": "lp",
}

__all__ = sorted(_EXPORTS)


def __getattr__(name):
    if name in _EXPORTS:
        return getattr(importlib.import_module(f".{_EXPORTS[name]}", __name__), name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
