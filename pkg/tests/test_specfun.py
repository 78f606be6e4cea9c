import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopfnode.specfun import (
    AI0, AIP0, J, J2, AiryRangeError, LogComplex, airy, airy_log, airy_scaled,
    base_determinant, connection_residual, fundamental_matrix, logsumexp_complex,
)
from hopfnode.spectrum import Params

mpmath.mp.dps = 30

moduli = st.floats(min_value=0.0, max_value=25.0)
angles = st.floats(min_value=-math.pi, max_value=math.pi)


def mp_log(fn, z, derivative=0):
    return complex(mpmath.log(fn(mpmath.mpc(z.real, z.imag), derivative=derivative)))


def same_log(a, b, tol):
    """Complex logs agree in magnitude and in phase modulo 2 pi."""
    d = a - b
    phase = (d.imag + math.pi) % (2 * math.pi) - math.pi
    return abs(d.real) < tol and abs(phase) < tol


def test_values_at_zero_match_gamma_closed_forms():
    assert abs(AI0 - 1 / (3 ** (2 / 3) * math.gamma(2 / 3))) < 1e-15
    assert abs(AIP0 + 1 / (3 ** (1 / 3) * math.gamma(1 / 3))) < 1e-15
    assert abs(airy(0.0) - AI0) < 1e-15
    assert abs(airy(0.0, "A'") - AIP0) < 1e-15


@pytest.mark.parametrize("z", [0.5, -2.0, 1 + 1j, -3 + 4j, 8j, 10 - 2j, -15 + 0.1j, 20 * J])
@pytest.mark.parametrize("kind,fn,der", [("A", mpmath.airyai, 0), ("A'", mpmath.airyai, 1),
                                         ("B", mpmath.airybi, 0), ("B'", mpmath.airybi, 1)])
def test_against_mpmath(z, kind, fn, der):
    got = complex(airy_log(complex(z), kind))
    assert same_log(got, mp_log(fn, complex(z), der), 1e-10)


@given(moduli, angles)
def test_ai_log_matches_mpmath_everywhere(r, a):
    z = cmath.rect(r, a)
    if r == 0:
        return
    assert same_log(complex(airy_log(z, "A")), mp_log(mpmath.airyai, z), 1e-9)
    assert same_log(complex(airy_log(z, "A'")), mp_log(mpmath.airyai, z, 1), 1e-9)


def test_large_argument_is_log_scaled():
    v = airy_scaled(200.0)
    ref = mp_log(mpmath.airyai, 200.0 + 0j)
    assert abs(v.logmag - ref.real) < 1e-9
    with pytest.raises(AiryRangeError):
        airy(40.0)


@given(moduli, angles)
def test_base_determinant_is_constant(r, a):
    z = cmath.rect(r, a)
    assert abs(base_determinant(z) - 1j / (2 * math.pi)) < 1e-10


@given(st.floats(0.0, 5.0), angles)
def test_rotation_identities(r, a):
    assert connection_residual(cmath.rect(r, a)) < 1e-9


def test_wronskian_ai_bi():
    for z in (0.3, -1 + 2j, 4j):
        w = airy(z) * airy(z, "B'") - airy(z, "A'") * airy(z, "B")
        assert abs(w - 1 / math.pi) < 1e-12


@pytest.mark.parametrize("eps3", [0.002, 0.0005])
@pytest.mark.parametrize("t", [-1.0, -0.2, 0.3, 0.7, 1.0])
def test_fundamental_matrix_determinant(eps3, t):
    m = fundamental_matrix(t, Params(eps3=eps3))
    assert abs(m.determinant() - 0.5j) < 1e-8


def test_fundamental_matrix_direct_determinant_where_no_cancellation():
    m = fundamental_matrix(0.1, Params(eps3=0.002))
    direct = m.value(0, 0) * m.value(1, 1) - m.value(0, 1) * m.value(1, 0)
    assert abs(direct - 0.5j) < 1e-10


def test_logcomplex_roundtrip_and_arithmetic():
    a, b = LogComplex.from_complex(3 - 4j), LogComplex.from_complex(-1 + 0.5j)
    assert abs(a.to_complex() - (3 - 4j)) < 1e-14
    assert abs((a * b).to_complex() - (3 - 4j) * (-1 + 0.5j)) < 1e-13
    assert abs((a / b).to_complex() - (3 - 4j) / (-1 + 0.5j)) < 1e-13
    assert abs((a + b).to_complex() - (2 - 3.5j)) < 1e-13
    assert abs((-a).to_complex() + (3 - 4j)) < 1e-13
    assert LogComplex.from_complex(0).to_complex() == 0
    with pytest.raises(ZeroDivisionError):
        a / LogComplex.from_complex(0)


@given(st.floats(-1e3, 1e3), angles, st.floats(-1e3, 1e3), angles)
def test_logsumexp_matches_shifted_sum(m1, p1, m2, p2):
    got = logsumexp_complex([complex(m1, p1), complex(m2, p2)])
    m = max(m1, m2)
    direct = cmath.exp(complex(m1 - m, p1)) + cmath.exp(complex(m2 - m, p2))
    if abs(direct) < 1e-12:
        return
    assert same_log(got, cmath.log(direct) + m, 1e-9)


def test_logsumexp_handles_overflowing_terms():
    out = logsumexp_complex(np.array([1000.0, 1000.0 + math.pi * 1j, 2000.0]))
    assert abs(out - 2000.0) < 1e-12


def test_rotation_constants():
    assert abs(J ** 3 - 1) < 1e-15 and abs(J2 - J.conjugate()) < 1e-15
