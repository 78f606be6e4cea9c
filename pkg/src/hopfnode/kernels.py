"""Hot numerical kernels: compiled when available, numpy/Python otherwise.

The backend is chosen once at import. Set ``HOPFNODE_PURE_PYTHON=1`` to
force the fallback (the benchmark and the parity tests use this switch).
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("HOPFNODE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"

airy_maclaurin = _impl.airy_maclaurin
airy_ode_march = _impl.airy_ode_march
rk4_linear = _impl.rk4_linear

__all__ = ["BACKEND", "airy_maclaurin", "airy_ode_march", "rk4_linear"]
