"""Log-scaled quadrature on complex paths and the explicit distinguished solutions.

The distinguished solutions of the normal form are

    X(t) = exp(t^2 / (2 eps3)) M(t) * integral of exp(-tau^2 / (2 eps3)) M(tau)^{-1} c dtau

over a path ending at ``t`` and starting at ``-inf`` (X_-) or ``+inf``
(X_+). The integrand is entire, so the path is deformed into the complex
plane where the integrand magnitude ``~ exp(-R(tau) / eps3)`` grows
monotonically towards ``t``. Values are carried as complex logarithms
throughout because ``exp(t^2 / (2 eps3))`` overflows doubles.
"""
import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .reliefscape import ComplexPath, approach_path, path_floor
from .specfun import AI0, AIP0, J, J2, LogComplex, ai_log_pair, logsumexp_complex
from .spectrum import Determination, HypothesisError, Params, Relief, check_hypotheses

__all__ = [
    "ScaledIntegrand", "QuadratureError", "QuadInfo", "path_integral", "explicit_solution",
    "solution_paths", "lemma_integrand", "lemma_da", "lemma_da_expansion", "majoration_check",
    "MajorationReport", "TAIL_EXPONENT", "lemma_da_fit",
]

GL_NODES, GL_WEIGHTS = leggauss(16)
_LOG_GL_WEIGHTS = np.log(GL_WEIGHTS)
TAIL_EXPONENT = 60.0
LOG_J = cmath.log(J)
LOG_J2 = cmath.log(J2)


class QuadratureError(RuntimeError):
    """Adaptive refinement did not converge."""


@dataclass(frozen=True)
class ScaledIntegrand:
    """An integrand given by its complex logarithm.

    ``log_fn(tau)`` returns ``log f(tau)`` elementwise. ``offset`` is a real
    reference exponent: ``exp(log f - offset)`` is O(1) on the region of
    interest and is what :meth:`scaled` returns.
    """

    log_fn: object
    offset: float = 0.0
    label: str = ""

    def log(self, tau):
        return self.log_fn(np.asarray(tau, dtype=complex))

    def scaled(self, tau):
        with np.errstate(under="ignore"):
            return np.exp(self.log(tau) - self.offset)

    def __call__(self, tau):
        return LogComplex.from_log(complex(self.log(complex(tau))))


@dataclass
class QuadInfo:
    pieces: int = 0
    depth: int = 0
    evaluations: int = 0
    notes: list = field(default_factory=list)


def _gl_log(log_fn, a, b):
    """log of the 16-point Gauss-Legendre estimate on each piece [a, b]."""
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    tau = mid[:, None] + h[:, None] * GL_NODES[None, :]
    with np.errstate(divide="ignore"):
        logs = log_fn(tau) + np.log(h)[:, None] + _LOG_GL_WEIGHTS[None, :]
    return logsumexp_complex(logs, axis=1)


def _log_abs_diff(la, lb):
    m = np.maximum(la.real, lb.real)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore", under="ignore", invalid="ignore"):
        d = np.abs(np.exp(la - m) - np.exp(lb - m))
        return np.log(d) + m


def path_integral(integrand, path, rtol=1e-10, max_level=20, steps=None, return_info=False):
    """Integral of ``integrand`` along ``path`` as a :class:`LogComplex`.

    Each segment is cut into pieces of length at most ``path.max_step`` (or
    ``steps[k]`` for segment ``k``); every piece is bisected until its
    16-point Gauss-Legendre value agrees with the sum over its halves to
    ``rtol``, relative either to the piece itself or to its share of the
    running total. Piece values stay in log form and are combined with a
    max-shifted sum.
    """
    log_fn = integrand.log if isinstance(integrand, ScaledIntegrand) else integrand
    segs = path.segments()
    total_len = path.length
    a_list, b_list = [], []
    for k, (za, zb) in enumerate(segs):
        step = path.max_step if steps is None or steps[k] is None else steps[k]
        n = max(int(math.ceil(abs(zb - za) / step)), 1)
        u = np.linspace(0.0, 1.0, n + 1)
        pts = za + u * (zb - za)
        a_list.append(pts[:-1])
        b_list.append(pts[1:])
    a = np.concatenate(a_list)
    b = np.concatenate(b_list)
    est = _gl_log(log_fn, a, b)
    info = QuadInfo(evaluations=16 * a.size)
    accepted = []
    log_rtol = math.log(rtol)
    for level in range(max_level + 1):
        mid = 0.5 * (a + b)
        l1 = _gl_log(log_fn, a, mid)
        l2 = _gl_log(log_fn, mid, b)
        info.evaluations += 32 * a.size
        halves = logsumexp_complex(np.stack([l1, l2]), axis=0)
        everything = np.concatenate(accepted + [halves]) if accepted else halves
        ref = logsumexp_complex(everything).real
        if not np.isfinite(ref):
            ref = np.max(np.abs(everything).real) if everything.size else 0.0
        err = _log_abs_diff(est, halves).real
        with np.errstate(divide="ignore"):
            share = ref + np.log(np.abs(b - a) / total_len)
        done = (err <= log_rtol + np.maximum(halves.real, share)) | ~np.isfinite(err)
        accepted.append(halves[done])
        info.depth = level
        if done.all():
            a = a[:0]
            break
        keep = ~done
        a, b, mid = a[keep], b[keep], mid[keep]
        a = np.concatenate([a, mid])
        b = np.concatenate([mid, b])
        est = np.concatenate([l1[keep], l2[keep]])
    if a.size:
        k = int(np.argmax(np.abs(b - a)))
        raise QuadratureError(
            f"no convergence after {max_level} refinement levels; {a.size} pieces left, "
            f"e.g. [{a[k]:.6g}, {b[k]:.6g}]")
    allv = np.concatenate(accepted)
    info.pieces = allv.size
    result = LogComplex.from_log(logsumexp_complex(allv)) if allv.size else LogComplex(-math.inf)
    return (result, info) if return_info else result


def _row_logs(params, sign_row):
    """log of the integrand rows of exp(-tau^2/(2 eps3)) * (M^{-1} c) without the constant.

    Row 1: ``eps j^2 A'(j^2 s) c1 - A(j^2 s) c2``; row 2:
    ``-eps j A'(j s) c1 + A(j s) c2`` with ``s = (tau - b) / eps^2``.
    """
    eps, eps3, b = params.eps, params.eps3, params.b
    c1, c2 = params.c1, params.c2
    rot = J2 if sign_row == 1 else J
    log_rot = LOG_J2 if sign_row == 1 else LOG_J
    w_prime = eps * c1 if sign_row == 1 else -eps * c1
    w_plain = -c2 if sign_row == 1 else c2
    weights = np.array([w_prime * cmath.exp(log_rot), w_plain])

    def log_fn(tau):
        s = (tau - b) / eps ** 2
        la, lp = ai_log_pair(rot * s)
        gauss = -0.5 * tau * tau / eps3
        stack = np.stack([lp, la])
        w = weights.reshape((2,) + (1,) * tau.ndim)
        return gauss + logsumexp_complex(stack, weights=w, axis=0)

    return log_fn


def _start_distance(relief, target, eps3, direction):
    """Distance along the real axis where the relief exceeds R(target) by TAIL_EXPONENT eps3."""
    need = float(relief.R(target)) + TAIL_EXPONENT * eps3
    x = 1.5
    while True:
        start = direction * x
        if float(relief.R(complex(start, 1e-300 if direction > 0 else 0.0))) >= need:
            return x
        x *= 1.5


def solution_paths(params, t, sign, beta=0.4, step=0.02):
    """Row paths (row 1, row 2) for the explicit solution at real ``t``.

    Row 1 follows ``R_lambda``; row 2 uses the conjugate path.
    """
    t = float(t)
    b = params.b
    if sign == "-":
        relief = Relief("lambda", b)
        T = _start_distance(relief, t, params.eps3, -1.0)
        betas = [beta] if t <= b else [beta, 0.3, 0.2, 0.15, 0.1, 0.05]
        path = None
        for bt in betas:
            cand = approach_path(relief, -T, t, bt, step)
            if t <= b or path_floor(ComplexPath(cand.nodes[-2:], step), relief) <= 1e-14:
                path = cand
                break
        if path is None:
            path = cand
    else:
        relief = Relief("lambda", b, Determination.SHIFTED)
        T = _start_distance(relief, t, params.eps3, 1.0)
        candidates = []
        if t > 0.02:
            candidates.append(ComplexPath((T, t), step))
        for q in (1.5 + 0.8j, 1.0 + 0.5j, 2.0 + 1.2j, 0.5 + 0.3j):
            for bt in (0.1, 0.05, 0.2):
                candidates.append(ComplexPath((T, q, complex(t, bt), t), step))
        path = min(candidates, key=lambda p: path_floor(p, relief, t))
    return path, path.conjugate()


def explicit_solution(params, t, sign="-", beta=0.4, rtol=1e-10, return_info=False):
    """X_- (``sign='-'``) or X_+ (``sign='+'``) at real ``t`` from the Airy representation.

    Returns ``(x, y)``; with ``return_info`` also a dict of diagnostics
    (imaginary residue, tail bound exponent, refinement depth, path floor).
    """
    sign = {"minus": "-", "plus": "+"}.get(sign, sign)
    if sign not in ("-", "+"):
        raise ValueError(f"sign must be '-' or '+', got {sign!r}")
    t = float(t)
    b, eps, eps3 = params.b, params.eps, params.eps3
    if sign == "-" and t > b + 0.2:
        raise ValueError(f"X_- explicit path needs t <= b + 0.2, got {t}")
    if sign == "+" and t < -b + 0.05:
        raise ValueError(f"X_+ explicit path needs t >= -b + 0.05, got {t}")
    if params.c1 == 0 and params.c2 == 0:
        return ((0.0, 0.0), {"imag_residue": 0.0}) if return_info else (0.0, 0.0)
    path1, path2 = solution_paths(params, t, sign, beta)
    final = min(0.05, eps / (4 * b)) * eps ** 2
    steps1 = [None] * (len(path1.nodes) - 2) + [max(final, 1e-6)]
    I1, info1 = path_integral(_row_logs(params, 1), path1, rtol, steps=steps1, return_info=True)
    I2, info2 = path_integral(_row_logs(params, 2), path2, rtol, steps=steps1, return_info=True)
    s = (t - b) / eps ** 2
    la_j, lp_j = ai_log_pair(J * s)
    la_j2, lp_j2 = ai_log_pair(J2 * s)
    const = cmath.log(-2j * math.pi / eps) + 0.5 * t * t / eps3
    x_log = logsumexp_complex([la_j + I1.log, la_j2 + I2.log]) + const
    y_log = logsumexp_complex([lp_j + LOG_J + I1.log, lp_j2 + LOG_J2 + I2.log]) + const + math.log(eps)
    x, y = cmath.exp(x_log), cmath.exp(y_log)
    scale = max(abs(x), abs(y), 1e-300)
    out = (x.real, y.real)
    if not return_info:
        return out
    relief = Relief("lambda", b) if sign == "-" else Relief("lambda", b, Determination.SHIFTED)
    info = {
        "imag_residue": max(abs(x.imag), abs(y.imag)) / scale,
        "tail_exponent": (float(relief.R(path1.start + 0j)) - float(relief.R(t))) / eps3,
        "depth": max(info1.depth, info2.depth),
        "pieces": info1.pieces + info2.pieces,
        "path": path1.nodes,
        "path_floor": path_floor(path1, relief, t) / eps3,
    }
    return out, info


_LEMMA_KINDS = {
    "A@j2": (J2, 0), "A'@j2": (J2, 1), "A@j": (J, 0), "A'@j": (J, 1),
}


def _lemma_kind(which):
    key = str(which).replace("²", "2").replace("′", "'").replace(" ", "")
    if key not in _LEMMA_KINDS:
        raise ValueError(f"which must be one of {sorted(_LEMMA_KINDS)}, got {which!r}")
    return key


def lemma_integrand(params, which="A@j2"):
    """``exp((b^2 - tau^2) / (2 eps3)) * Airy(rot (tau - b) / eps^2)`` as a ScaledIntegrand."""
    key = _lemma_kind(which)
    rot, deriv = _LEMMA_KINDS[key]
    b, eps, eps3 = params.b, params.eps, params.eps3

    def log_fn(tau):
        la, lp = ai_log_pair(rot * (tau - b) / eps ** 2)
        return 0.5 * (b * b - tau * tau) / eps3 + (lp if deriv else la)

    return ScaledIntegrand(log_fn, 0.0, key)


def lemma_da(params, which="A@j2", beta=0.5, pad=2.0, piece="full", rtol=1e-10):
    """The lemma integral from ``-inf`` to ``b`` along the descending path.

    ``piece`` selects ``'full'``, ``'vertical'`` (``b + i beta -> b``) or
    ``'approach'`` (``-inf -> b + i beta``). The ``j`` variants use the
    conjugate path.
    """
    key = _lemma_kind(which)
    b, eps = params.b, params.eps
    if not check_hypotheses(params).all_pass:
        raise HypothesisError(f"b = {b} violates the standing hypotheses")
    relief = Relief("lambda", b)
    T = max(_start_distance(relief, b, params.eps3, -1.0), b + pad)
    path = approach_path(relief, -T, b, beta, 0.02)
    if key.endswith("@j"):
        path = path.conjugate()
    nodes = path.nodes
    if piece == "vertical":
        path = ComplexPath(nodes[-2:], path.max_step)
    elif piece == "approach":
        path = ComplexPath(nodes[:-1], path.max_step)
    elif piece != "full":
        raise ValueError(f"unknown piece {piece!r}")
    final = min(0.05, eps / (4 * b)) * eps ** 2
    steps = [None] * (len(path.nodes) - 1)
    if piece != "approach":
        steps[-1] = final
    return path_integral(lemma_integrand(params, key), path, rtol, steps=steps)


def lemma_da_expansion(b, which="A@j2", order=7):
    """Coefficients {power of eps: value} of the four displayed expansions."""
    key = _lemma_kind(which)
    rot = J2 if key.endswith("j2") else J
    other = J if rot == J2 else J2
    if key.startswith("A'"):
        coeffs = {3: -AIP0 / b, 5: -other * AI0 / b ** 3, 6: (1 / b ** 3 - 2 / b ** 4) * AIP0}
    else:
        coeffs = {3: -AI0 / b, 4: -rot * AIP0 / b ** 2, 6: (1 / b ** 3 - 1 / b ** 4) * AI0,
                  7: (3 * rot / b ** 4 - 2 * rot / b ** 5) * AIP0}
    return {k: complex(v) for k, v in coeffs.items() if k <= order}


def lemma_da_fit(b, which="A@j2", eps3_list=(0.002, 0.001, 0.0005, 0.00025, 0.000125, 6.25e-5),
                 piece="full"):
    """Fit the lowest expansion coefficients of :func:`lemma_da` over ``eps3_list``.

    The fitted powers of eps are the displayed powers of
    :func:`lemma_da_expansion` plus the first undisplayed power 7, capped at
    ``len(eps3_list)`` unknowns. Returns ``{power: fitted coefficient}``.
    """
    powers = sorted(set(lemma_da_expansion(b, which)) | {7})[: len(eps3_list)]
    eps = np.array(eps3_list, dtype=float) ** (1.0 / 3.0)
    vals = np.array([lemma_da(Params(b=b, eps3=e3), which, piece=piece).to_complex()
                     for e3 in eps3_list])
    design = eps[:, None] ** np.array(powers)[None, :]
    coef = np.linalg.lstsq(design.astype(complex), vals, rcond=None)[0]
    return dict(zip(powers, (complex(c) for c in coef)))


@dataclass
class MajorationReport:
    decay_fit: float
    raw_fit: float
    decay_intercept: float
    theory_decay: float
    margin_delta: float
    bound_holds: bool
    region_samples: list
    tail_log: float
    lemma_bound_log: float
    approach_log: float
    notes: list = field(default_factory=list)


def majoration_check(params, beta=0.5, sigma_range=(5.0, 30.0), n=60):
    """Numerical check of the decay bounds on the lemma integrand.

    On the vertical segment ``|f(b + i sigma eps^2)| = exp(sigma^2 eps / 2) |A(i j^2 sigma)|``.
    ``decay_fit`` is the slope of ``ln|f| - sigma^2 eps / 2`` (the Airy
    factor) against ``sigma^{3/2}`` on ``sigma_range``; ``raw_fit`` is the
    slope of ``ln|f|`` itself. The method then checks the bound ``|f| <= k exp(-delta sigma^{3/2})``
    on ``[0, beta / eps^2]`` with ``delta = sqrt(2)/3 - sqrt(beta)/2``;
    samples the region ``pi/3 < arg(tau - b) < pi`` against the relief; and
    measures the discarded path tail before ``-T``.
    """
    if not 0 < beta < 8.0 / 9.0:
        raise ValueError("beta must lie in (0, 8/9)")
    b, eps, eps3 = params.b, params.eps, params.eps3
    f = lemma_integrand(params, "A@j2")
    sig = np.linspace(sigma_range[0], sigma_range[1], n)
    lf = f.log(b + 1j * sig * eps ** 2).real
    raw_slope = np.polyfit(sig ** 1.5, lf, 1)[0]
    slope, intercept = np.polyfit(sig ** 1.5, lf - 0.5 * sig ** 2 * eps, 1)
    theory = math.sqrt(2.0) / 3.0
    delta = theory - 0.5 * math.sqrt(beta)
    grid = np.linspace(0.0, beta / eps ** 2, 4000)
    lg = f.log(b + 1j * grid * eps ** 2).real
    k_log = float(np.max(lg + delta * grid ** 1.5))
    # the bound holds with k = exp(k_log); require k to be a moderate constant
    bound_holds = bool(k_log < 5.0)
    relief = Relief("lambda", b)
    samples = []
    for r in (0.2, 0.3, 0.5):
        for ang in (0.4 * math.pi, 2 * math.pi / 3, 0.9 * math.pi):
            tau = b + r * cmath.exp(1j * ang)
            lhs = float(f.log(tau).real) * eps3
            rhs = -(float(relief.R(tau)) - b * b / 2)
            samples.append((tau, lhs, rhs))
    T = max(_start_distance(relief, b, eps3, -1.0), b + 2.0)
    tail = path_integral(f, ComplexPath((-(T + 5.0), -T), 0.05), 1e-8)
    path = approach_path(relief, -T, b, beta, 0.02)
    approach = path_integral(f, ComplexPath(path.nodes[:-1], 0.02), 1e-10)
    top = b + 1j * beta
    lemma_bound = -(float(relief.R(top)) - b * b / 2) / eps3
    return MajorationReport(
        decay_fit=float(slope), raw_fit=float(raw_slope), decay_intercept=float(intercept), theory_decay=-theory,
        margin_delta=delta, bound_holds=bound_holds, region_samples=samples,
        tail_log=tail.logmag, lemma_bound_log=lemma_bound, approach_log=approach.logmag)
