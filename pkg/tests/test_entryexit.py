import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopfnode.entryexit import (
    IoResult, NoExitError, conjectured_exit, hfn_band, hopf_bump_relation, hopf_canard_exit,
    measure_exit,
)
from hopfnode.spectrum import HypothesisError, Params, real_crossings


def grid_zero_area(re_lambda, t_e, hi=5.0, n=400001):
    """Brute-force oracle: first grid time where the running trapezoid area turns positive."""
    s = np.linspace(t_e, hi, n)
    v = re_lambda(s)
    area = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(s))])
    k = np.nonzero((area > 0) & (s > t_e + 1e-3))[0][0]
    return s[k]


@pytest.mark.parametrize("t_e", [-0.9, -0.5, -0.1])
def test_linear_rate_gives_mirror_exit(t_e):
    assert hopf_canard_exit(lambda s: s, t_e).value == pytest.approx(-t_e, abs=1e-10)


@pytest.mark.parametrize("t_e", [-0.8, -0.3])
def test_nonlinear_rate_against_grid_oracle(t_e):
    rate = lambda s: np.sinh(s) + 0.3 * s ** 2  # noqa: E731
    got = hopf_canard_exit(rate, t_e).value
    assert abs(got - grid_zero_area(rate, t_e)) < 1e-4


def test_canard_exit_errors():
    with pytest.raises(ValueError):
        hopf_canard_exit(lambda s: s, 0.5)
    with pytest.raises(ValueError):
        hopf_canard_exit(lambda s: s - 20.0, -1.0)


def test_hopf_bump_relation():
    assert hopf_bump_relation(-0.4).value == pytest.approx(0.4)
    assert hopf_bump_relation(-1.5).value == 1.0
    assert hopf_bump_relation(-1.0).kind == "any-beyond"
    with pytest.raises(ValueError):
        hopf_bump_relation(0.1)


def test_band_is_a_point_below_b():
    r = hfn_band(Params(), -0.2)
    assert r.kind == "point" and r.value == pytest.approx(0.2)


@given(st.floats(-0.365, -0.301))
def test_band_is_ordered_and_solves_equal_area(t_e):
    r = hfn_band(Params(), t_e)
    lo, hi = r.values
    assert 0.3 < lo <= hi
    assert 0.5 * lo ** 2 + 2 / 3 * (lo - 0.3) ** 1.5 == pytest.approx(0.5 * t_e ** 2, abs=1e-12)
    assert 0.5 * hi ** 2 - 2 / 3 * (hi - 0.3) ** 1.5 == pytest.approx(0.5 * t_e ** 2, abs=1e-12)


def test_band_widens_monotonically():
    widths = [np.diff(hfn_band(Params(), t).values)[0] for t in (-0.31, -0.33, -0.35, -0.36)]
    assert all(a < b for a, b in zip(widths, widths[1:]))


def test_band_beyond_anti_bump_is_capped():
    anti, s1, s2 = real_crossings(0.3)
    r = hfn_band(Params(), anti - 0.2)
    assert r.values == (s1, s2) and r.flags["open_ended"]
    near = hfn_band(Params(), anti + 1e-9).values
    assert np.allclose(near, (s1, s2), atol=1e-6)


def test_band_errors():
    with pytest.raises(HypothesisError):
        hfn_band(Params(b=0.2), -0.5)
    with pytest.raises(ValueError):
        hfn_band(Params(), 0.1)


def test_conjectured_exit():
    assert conjectured_exit(Params(), -0.2).value == pytest.approx(0.2)
    assert conjectured_exit(Params(), -0.7).value == pytest.approx(0.3)


def test_io_result_validation():
    with pytest.raises(ValueError):
        IoResult("interval", (0.5, 0.4), "x")
    with pytest.raises(ValueError):
        IoResult("point", (0.1, 0.2), "x")
    with pytest.raises(ValueError):
        IoResult("ray", (0.1,), "x")


def test_measured_exit_near_mirror_for_small_entries():
    t_s = measure_exit(Params(), -0.15)
    assert abs(t_s - 0.15) < 0.1 and t_s > 0.15


def test_measure_exit_guards():
    with pytest.raises(ValueError):
        measure_exit(Params(), 0.1)
    with pytest.raises(ValueError):
        measure_exit(Params(), -0.2, r0=1e-2)
    with pytest.raises(ValueError):
        measure_exit(Params(), -0.2, r0=1e-3, delta=0.05)
    with pytest.raises(NoExitError):
        measure_exit(Params(), -0.2, t_max=0.1)
