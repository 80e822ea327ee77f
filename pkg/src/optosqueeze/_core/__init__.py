"""Time-stepping kernel: compiled extension when available, pure Python otherwise.

Set ``OPTOSQUEEZE_FORCE_PYTHON=1`` to force the fallback.
"""
import os

from . import _rk4_py

python_integrate = _rk4_py.integrate

try:
    if os.environ.get("OPTOSQUEEZE_FORCE_PYTHON"):
        raise ImportError("fallback forced by OPTOSQUEEZE_FORCE_PYTHON")
    from ._rk4 import integrate
    BACKEND = "cython"
except ImportError:
    integrate = python_integrate
    BACKEND = "python"

try:
    from ._rk4 import integrate as compiled_integrate
except ImportError:
    compiled_integrate = None

__all__ = ["integrate", "python_integrate", "compiled_integrate", "BACKEND"]
