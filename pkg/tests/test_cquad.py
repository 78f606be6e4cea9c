import math

import numpy as np
import pytest
from scipy.special import erf

from hopfnode.cquad import (
    QuadratureError, ScaledIntegrand, explicit_solution, lemma_da, lemma_da_expansion,
    lemma_da_fit, majoration_check, path_integral,
)
from hopfnode.reliefscape import ComplexPath
from hopfnode.specfun import AI0, AIP0
from hopfnode.spectrum import HypothesisError, Params

# Independent RK4 runs at h = 2e-5 from t = -4 (frozen oracle values).
RK4_AT_ZERO = (-0.0067099195892945775, -4.562707023642519e-05)
RK4_AT_B = (-0.024388228440333917, 0.007072306189877396)


def gaussian(scale):
    return ScaledIntegrand(lambda z: -z * z / scale, 0.0, "gauss")


def test_gaussian_against_erf():
    got = path_integral(gaussian(0.001), ComplexPath((-1.0, 0.0))).to_complex()
    exact = 0.5 * math.sqrt(math.pi * 0.001) * erf(1 / math.sqrt(0.001))
    assert abs(got - exact) < 1e-13


def test_integral_is_path_independent():
    f = ScaledIntegrand(lambda z: np.log(z * z + 1.0 + 0j) + 3 * z)
    straight = path_integral(f, ComplexPath((0.0, 1.0 + 1.0j))).to_complex()
    bent = path_integral(f, ComplexPath((0.0, -0.5j, 1.5 - 0.5j, 1.0 + 1.0j))).to_complex()
    assert abs(straight - bent) < 1e-11 * abs(straight)


def test_huge_exponents_stay_in_log_form():
    f = ScaledIntegrand(lambda z: 2000.0 * z + 0j)
    got = path_integral(f, ComplexPath((0.0, 1.0)))
    assert abs(got.logmag - (2000.0 - math.log(2000.0))) < 1e-10


def test_refinement_failure_raises():
    f = ScaledIntegrand(lambda z: np.log(np.abs(z - 0.5) + 0j) * 0 + 1e3j * np.sin(1e4 * z.real))
    with pytest.raises(QuadratureError):
        path_integral(f, ComplexPath((0.0, 1.0)), max_level=2)


@pytest.mark.parametrize("t,ref,tol", [(0.0, RK4_AT_ZERO, 1e-9), (0.3, RK4_AT_B, 1e-4)])
def test_explicit_solution_matches_rk4(t, ref, tol):
    got = np.array(explicit_solution(Params(), t, "-"))
    assert np.linalg.norm(got - ref) <= tol * np.linalg.norm(ref)


def test_explicit_solution_is_real():
    _, info = explicit_solution(Params(), -0.2, "-", return_info=True)
    assert info["imag_residue"] < 1e-10
    assert info["tail_exponent"] >= 60.0 - 1e-9
    assert info["path_floor"] <= 1e-9


def test_both_distinguished_solutions_agree_at_b():
    xm = np.array(explicit_solution(Params(), 0.3, "-"))
    xp = np.array(explicit_solution(Params(), 0.3, "+"))
    assert np.linalg.norm(xm - xp) < 2e-3 * np.linalg.norm(xm)


def test_explicit_solution_zero_forcing_and_domain():
    assert explicit_solution(Params(c1=0.0, c2=0.0), 0.0) == (0.0, 0.0)
    with pytest.raises(ValueError):
        explicit_solution(Params(), 0.6, "-")
    with pytest.raises(ValueError):
        explicit_solution(Params(), -0.5, "+")
    with pytest.raises(ValueError):
        explicit_solution(Params(), 0.0, "up")


def test_explicit_solution_is_linear_in_forcing():
    a = np.array(explicit_solution(Params(c1=1.0, c2=0.0), -0.1))
    b = np.array(explicit_solution(Params(c1=0.0, c2=1.0), -0.1))
    both = np.array(explicit_solution(Params(c1=2.0, c2=-3.0), -0.1))
    assert np.allclose(both, 2 * a - 3 * b, rtol=1e-9, atol=0)


def test_lemma_pieces_add_up():
    p = Params(eps3=0.002)
    full = lemma_da(p, "A@j2").to_complex()
    parts = lemma_da(p, "A@j2", piece="vertical").to_complex() + \
        lemma_da(p, "A@j2", piece="approach").to_complex()
    assert abs(full - parts) < 1e-10 * abs(full)


def test_lemma_variants_are_conjugate():
    p = Params(eps3=0.001)
    assert abs(lemma_da(p, "A@j2").to_complex() - lemma_da(p, "A@j").to_complex().conjugate()) \
        < 1e-10 * abs(lemma_da(p, "A@j").to_complex())


def test_lemma_expansion_error_shrinks_with_eps():
    errs = []
    for e3 in (0.002, 0.0005, 0.000125):
        exp = lemma_da_expansion(0.3, "A@j2")
        eps = e3 ** (1 / 3)
        approx = sum(v * eps ** k for k, v in exp.items())
        errs.append(abs(lemma_da(Params(eps3=e3), "A@j2").to_complex() - approx))
    assert errs[0] > errs[1] > errs[2]


def test_lemma_leading_terms():
    assert lemma_da_expansion(0.3, "A@j")[3] == pytest.approx(-AI0 / 0.3)
    assert lemma_da_expansion(0.3, "A'@j2")[3] == pytest.approx(-AIP0 / 0.3)
    fit = lemma_da_fit(0.3, "A@j2")
    assert abs(fit[3] + AI0 / 0.3) < 0.01 * AI0 / 0.3
    with pytest.raises(ValueError):
        lemma_da_expansion(0.3, "B@j")


def test_lemma_needs_hypotheses():
    with pytest.raises(HypothesisError):
        lemma_da(Params(b=0.2), "A@j2")


def test_majoration_bounds():
    rep = majoration_check(Params(eps3=0.0005))
    assert abs(rep.decay_fit - rep.theory_decay) < 0.05
    assert rep.bound_holds
    assert rep.tail_log < -40
    assert rep.approach_log <= rep.lemma_bound_log
