import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopfnode.spectrum import (
    B_UPPER, CutLineAmbiguity, Determination, HypothesisError, Params, Relief,
    check_hypotheses, critical_point, critical_points, eigenvalues, hopf_relief, real_crossings,
    relief,
)

admissible_b = st.floats(0.26, B_UPPER - 0.01)
off_axis = st.complex_numbers(min_magnitude=0.0, max_magnitude=2.0).filter(lambda z: abs(z.imag) > 1e-3)


def test_params_validation_and_replace():
    p = Params()
    assert p.hyp_b and p.hyp_b1 and abs(p.eps ** 3 - 0.002) < 1e-15
    assert p.replace(eps3=0.001).eps3 == 0.001 and p.replace(eps3=0.001).b == 0.3
    with pytest.raises(ValueError):
        Params(eps3=0.0)
    assert not Params(b=0.2).hyp_b1


@given(st.floats(-2, 2), admissible_b)
def test_eigenvalue_sum_and_product(t, b):
    e = eigenvalues(t, b)
    assert abs(e.lam + e.mu - 2 * t) < 1e-12
    assert abs(e.lam * e.mu - (t * t - t + b)) < 1e-12


@given(off_axis, admissible_b)
def test_relief_derivative_is_eigenvalue(t, b):
    rel = Relief("lambda", b)
    h = 1e-6
    if abs(t - b) < 1e-3:
        return
    deriv = (rel.F(t + h) - rel.F(t - h)) / (2 * h)
    assert abs(complex(deriv) - complex(rel.slope(t))) < 1e-6


@given(off_axis, admissible_b)
def test_mirror_relief(t, b):
    lam, mu = Relief("lambda", b), Relief("mu", b)
    assert abs(float(mu.R(t.conjugate())) - float(lam.R(t))) < 1e-12


def test_relief_on_real_axis_before_b():
    for t in (-1.0, -0.3, 0.0, 0.2):
        assert abs(relief(t, 0.3).R - 0.5 * t * t) < 1e-14


def test_cut_requires_a_side():
    with pytest.raises(CutLineAmbiguity) as info:
        relief(0.5, 0.3)
    assert info.value.low.R != info.value.high.R
    low = relief(0.5, 0.3, side="low").R
    assert abs(low - (0.125 - 2 / 3 * 0.2 ** 1.5)) < 1e-14
    shifted = relief(0.5, 0.3, branch=Determination.SHIFTED)
    assert abs(shifted.R - low) < 1e-14


def test_determination_ranges():
    assert Determination.POSITIVE.on_cut(1.0) and not Determination.POSITIVE.on_cut(-1.0)
    assert Determination.SHIFTED.on_cut(-1j) and not Determination.SHIFTED.on_cut(1.0)


def test_critical_point_values():
    t_c, r_c = critical_point(0.3)
    assert abs(t_c - complex(0.5, 0.22360679)) < 1e-8
    assert abs(r_c - 0.0666667) < 1e-6
    assert abs(float(Relief("lambda", 0.3).R(t_c)) - r_c) < 1e-12
    assert len(critical_points(0.3)) == 1
    with pytest.raises(HypothesisError):
        critical_point(0.2)


def test_real_crossings_against_printed_values():
    t_e, s1, s2 = real_crossings(0.3)
    assert abs(t_e + 0.36514) < 1e-5
    assert abs(s1 - 0.346) <= 1e-3 and abs(s2 - 0.525) <= 1e-3
    r_c = critical_point(0.3)[1]
    assert abs(0.5 * s1 ** 2 + 2 / 3 * (s1 - 0.3) ** 1.5 - r_c) < 1e-12
    assert abs(0.5 * s2 ** 2 - 2 / 3 * (s2 - 0.3) ** 1.5 - r_c) < 1e-12
    with pytest.raises(HypothesisError):
        real_crossings(0.9)


def test_hypotheses_report_never_raises():
    assert check_hypotheses(Params()).all_pass
    assert not check_hypotheses(0.2).all_pass
    late = check_hypotheses(0.85)
    assert not late.all_pass and late.bump is not None


def test_hopf_relief():
    assert abs(hopf_relief(1.0).R - 0.0) < 1e-15
    assert abs(hopf_relief(-1.0).R - 0.0) < 1e-15
    assert abs(hopf_relief(0.0).R + 0.5) < 1e-15
    assert np.allclose(Relief(system="hopf").R(np.array([0.3, -0.3])), (0.09 - 1) / 2)
