import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopfnode.series import (
    IllConditionedFit, Jet, PowerSeries, compare_expansions, qss_term, qss_value, xminus_at_b_fit,
    xminus_display, xplus_at_b, xplus_display,
)
from hopfnode.spectrum import Params

coef = st.lists(st.floats(-3, 3), min_size=4, max_size=4)


@given(coef, coef, st.floats(-1, 1))
def test_jet_product_rule(a, b, t0):
    f, g = Jet(a, t0), Jet(b, t0)
    assert np.allclose((f * g).derivative().coeffs,
                       (f.derivative() * g.truncate(2) + f.truncate(2) * g.derivative()).coeffs,
                       atol=1e-10)


@given(coef, st.floats(-1, 1))
def test_jet_reciprocal(a, t0):
    a = [a[0] + 5.0] + a[1:]
    f = Jet(a, t0)
    one = f * f.reciprocal()
    assert np.allclose(one.coeffs, [1, 0, 0, 0], atol=1e-12)
    assert np.allclose((f / f).coeffs, [1, 0, 0, 0], atol=1e-12)


def test_jet_derivative_values():
    t = Jet.variable(0.5, 3)
    cube = t * t * t
    assert cube.value == pytest.approx(0.125)
    assert cube.derivative_value(1) == pytest.approx(0.75)
    assert cube.derivative_value(2) == pytest.approx(3.0)
    assert cube.derivative_value(3) == pytest.approx(6.0)


def test_power_series_arithmetic():
    a = PowerSeries.from_dict({0: 1.0, 1: 2.0}, 4)
    b = PowerSeries.from_dict({1: 1.0}, 4)
    prod = a * b
    assert prod[1] == 1.0 and prod[2] == 2.0 and prod[3] == 0.0 and prod[9] == 0.0
    assert (a - a).nonzero() == {}
    assert a(0.1) == pytest.approx(1.2)


@pytest.mark.parametrize("t", [-1.0, -0.2, 0.3, 0.8])
def test_first_term_closed_form(t):
    p = Params(c1=0.7, c2=-1.3)
    x, y = qss_term(p, t, 1, 0)
    d = t * t - t + p.b
    assert x.value == pytest.approx((-p.c1 * t + p.c2) / d, rel=1e-13)
    assert y.value == pytest.approx(((t - p.b) * p.c1 - t * p.c2) / d, rel=1e-13)


def test_second_term_solves_recurrence():
    p = Params(c1=0.7, c2=-1.3)
    t, h = 0.1, 1e-5
    x2, y2 = qss_term(p, t, 2, 0)
    dx1 = (qss_term(p, t + h, 1, 0)[0].value - qss_term(p, t - h, 1, 0)[0].value) / (2 * h)
    dy1 = (qss_term(p, t + h, 1, 0)[1].value - qss_term(p, t - h, 1, 0)[1].value) / (2 * h)
    assert t * x2.value + y2.value == pytest.approx(dx1, rel=1e-8)
    assert (t - p.b) * x2.value + t * y2.value == pytest.approx(dy1, rel=1e-8)


def test_residual_order_grows_with_terms():
    p = Params(c1=0.0, c2=-1.0)
    slopes = []
    for n in (1, 2):
        res = []
        eps3s = np.array([1e-3, 5e-4, 2.5e-4])
        for e3 in eps3s:
            q = p.replace(eps3=e3)
            t, h = -0.5, 1e-4
            xp = np.array(qss_value(q, t + h, n))
            xm = np.array(qss_value(q, t - h, n))
            x = np.array(qss_value(q, t, n))
            lhs = e3 * (xp - xm) / (2 * h)
            rhs = np.array([t * x[0] + x[1], (t - p.b) * x[0] + t * x[1]]) + e3 * np.array(p.c)
            res.append(np.linalg.norm(lhs - rhs))
        slopes.append(np.polyfit(np.log(eps3s ** (1 / 3)), np.log(res), 1)[0])
    assert abs(slopes[0] - 6) < 0.3 and abs(slopes[1] - 9) < 0.3


@given(st.floats(0.26, 0.8), st.floats(-2, 2), st.floats(-2, 2))
def test_recurrence_matches_displayed_coefficients(b, c1, c2):
    x, y = xplus_at_b(Params(b=b, c1=c1, c2=c2), order=6)
    disp = xplus_display(b, c1, c2)
    for k in (3, 6):
        scale = max(1.0, abs(disp[k][0]), abs(disp[k][1]))
        assert abs(x[k] - disp[k][0]) <= 1e-12 * scale
        assert abs(y[k] - disp[k][1]) <= 1e-12 * scale


@given(st.floats(0.26, 0.8), st.floats(-2, 2), st.floats(-2, 2))
def test_two_transcriptions_agree(b, c1, c2):
    a, m = xplus_display(b, c1, c2), xminus_display(b, c1, c2)
    for k in (3, 6):
        assert np.allclose(a[k], m[k], rtol=1e-12, atol=1e-12)


def test_figure_coefficients():
    x, y = xplus_at_b(Params(), order=9)
    assert x[3] == pytest.approx(-11.1111111, rel=1e-8)
    assert x[6] == pytest.approx(-452.674897, rel=1e-8)
    assert y[6] == pytest.approx(86.4197531, rel=1e-8)
    assert x[9].real == pytest.approx(-35817.7, rel=1e-4)
    with pytest.raises(ValueError):
        xplus_at_b(Params(), order=12)


def test_fit_guards():
    with pytest.raises(ValueError):
        xminus_at_b_fit(Params(), (0.0005, 0.00025), order=6)
    with pytest.raises(ValueError):
        xminus_at_b_fit(Params(), (0.004, 0.002, 0.001), order=6)
    with pytest.raises(IllConditionedFit):
        xminus_at_b_fit(Params(), tuple(1e-4 * (1 - k * 1e-5) for k in range(4)), order=9)


def test_fit_recovers_coefficients():
    cmp = compare_expansions(Params())
    assert cmp["display"] < 1e-12 and cmp["recurrence"] < 1e-12
    assert cmp["fit"] < 0.01
