import numpy as np
import pytest

from hopfnode.reliefscape import (
    ComplexPath, PathConstructionError, approach_path, descending_reachability, is_descending,
    level_curves, path_floor, stencil, xm_path,
)
from hopfnode.spectrum import CutLineAmbiguity, Relief, critical_point, real_crossings


def test_complex_path_geometry():
    p = ComplexPath((0, 1, 1 + 1j))
    assert p.start == 0 and p.end == 1 + 1j and abs(p.length - 2) < 1e-15
    assert p.reversed().start == 1 + 1j
    assert p.conjugate().end == 1 - 1j
    pts, tang, seg = p.sample(0.1)
    assert np.allclose(np.abs(tang), 1.0) and set(seg) == {0, 1}
    with pytest.raises(ValueError):
        ComplexPath((0,))
    with pytest.raises(ValueError):
        ComplexPath((0, 0, 1))


def test_xm_path_descends_except_last_segment():
    rel = Relief("lambda", 0.3)
    p = xm_path(0.3, beta=0.5)
    assert is_descending(p, rel, segments=[0, 1])
    assert not is_descending(p, rel)
    assert is_descending(p.conjugate(), Relief("mu", 0.3), segments=[0, 1])
    with pytest.raises(ValueError):
        xm_path(0.3, beta=0.95)


def test_path_floor_is_zero_on_a_descending_path():
    rel = Relief("lambda", 0.3)
    p = approach_path(rel, -2.3, 0.0, 0.4)
    assert path_floor(p, rel, 0.0) <= 1e-12


def test_approach_path_reports_blocking_level():
    rel = Relief("lambda", 0.3)
    with pytest.raises(PathConstructionError):
        approach_path(rel, -0.2, 0.25, 0.8, corners=[0.0])


def test_descent_check_refuses_the_cut():
    with pytest.raises(CutLineAmbiguity):
        is_descending(ComplexPath((0.2, 0.8)), Relief("lambda", 0.3))


def test_level_curves_pass_near_the_critical_point():
    t_c, r_c = critical_point(0.3)
    curves = level_curves(Relief("lambda", 0.3), r_c, n=201)
    assert len(curves) >= 2
    assert min(np.min(np.abs(c - t_c)) for c in curves) < 0.02
    rel = Relief("lambda", 0.3)
    for c in curves:
        off = np.abs(c - 0.3) > 0.05
        assert np.allclose(rel.R(c[off] + 1e-300j), r_c, atol=2e-3)


def test_stencil_steps_are_primitive():
    steps = stencil(2)
    assert (1, 0) in steps and (2, 1) in steps and (2, 2) not in steps
    assert len(stencil(1)) == 8


def test_hopf_reachability_from_minus_two():
    h = Relief("lambda", system="hopf")
    r = descending_reachability(-2, [h, h.conjugate()], bbox=(-2.5, 2.5, -2.5, 2.5), n=101)
    xs, ok = r.intersection.real_axis()
    assert xs[ok].min() <= -1.9 and 0.9 <= xs[ok].max() <= 1.06


def test_normal_form_reachability_stops_at_b():
    t_e = real_crossings(0.3)[0]
    r = descending_reachability(t_e, [Relief("lambda", 0.3), Relief("mu", 0.3)], n=201)
    xs, ok = r.intersection.real_axis()
    assert abs(xs[ok].max() - 0.3) < 0.02
    assert not r.masks[0].cell_reachable(critical_point(0.3)[0])
