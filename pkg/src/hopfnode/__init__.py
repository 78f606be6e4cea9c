"""Delayed loss of stability in a planar slow-fast linear system.

The system ``eps3 X' = J(t) X + eps3 c`` with ``J(t) = [[t, 1], [t - b, t]]``
has complex eigenvalues ``t +/- i sqrt(b - t)`` before ``t = b`` and real
ones after. The package computes its complex-time relief, the explicit
Airy-integral solutions bounded at either end, their asymptotic
expansions, and simulated entrance-exit relations.
"""
from .kernels import BACKEND
from .spectrum import Params

__version__ = "0.1.0"
__all__ = ["BACKEND", "Params", "__version__"]
