"""Kernel dispatch: compiled extension when built, pure Python otherwise.

Set ``LDLAB_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
the kernel-equivalence tests).
"""

import os

from . import _core_py

if os.environ.get("LDLAB_PURE_PYTHON") == "1":
    _impl = _core_py
    COMPILED = False
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        _impl = _core_py
        COMPILED = False

injection_sum = _impl.injection_sum
injection_grad = _impl.injection_grad
injection_hess_apply = _impl.injection_hess_apply
dtensor_sq_sums = _impl.dtensor_sq_sums

__all__ = [
    "COMPILED",
    "injection_sum",
    "injection_grad",
    "injection_hess_apply",
    "dtensor_sq_sums",
    "pure_python",
]


def pure_python():
    """Handle to the fallback implementation (for benchmarks and equivalence tests)."""
    return _core_py
