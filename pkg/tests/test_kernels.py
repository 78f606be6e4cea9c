import numpy as np
import pytest

from hopfnode import _fallback, kernels

compiled = pytest.importorskip("hopfnode._kernels")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_maclaurin_parity():
    z = np.linspace(-3, 3, 50) * np.exp(0.4j)
    for a, b in zip(compiled.airy_maclaurin(z), _fallback.airy_maclaurin(z)):
        assert np.abs(a - b).max() <= 1e-14 * np.abs(b).max()


def test_ode_march_parity():
    z = np.linspace(-2, 2, 20) + 0.5j
    for a, b in zip(compiled.airy_ode_march(z, 1.0, 0.5, z + 2.0, 8),
                    _fallback.airy_ode_march(z, 1.0, 0.5, z + 2.0, 8)):
        assert np.abs(a - b).max() <= 1e-13 * np.abs(b).max()


def test_rk4_parity():
    args = (-1.0, 0.01, -0.02, 1e-4, 5000, 0.002, 0.3, 0.0, -1.0)
    fast, slow = compiled.rk4_linear(*args), _fallback.rk4_linear(*args)
    assert fast[3] == slow[3]
    for a, b in zip(fast[:3], slow[:3]):
        assert np.allclose(a[:fast[3]], b[:slow[3]], rtol=1e-13, atol=1e-300)
