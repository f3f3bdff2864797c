"""Kernel selection: compiled extension when available, numpy fallback otherwise.

Set PAMC_PURE_PYTHON=1 to force the fallback (used by the benchmark and to
cross-check the two implementations).
"""
import os

from . import reference

COMPILED = False
objective_and_grad = reference.objective_and_grad

if os.environ.get("PAMC_PURE_PYTHON") != "1":
    try:
        from . import _core

        objective_and_grad = _core.objective_and_grad
        COMPILED = True
    except ImportError:
        pass

__all__ = ["objective_and_grad", "COMPILED", "reference"]
