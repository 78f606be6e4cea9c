"""Truncated power series in eps, Taylor jets, and the quasi-stationary expansion.

The solution bounded as ``t -> +inf`` has the formal expansion
``X_+ = sum_n X_n(t) eps3^n`` whose terms solve ``J(t) X_n = X'_{n-1} - [n == 1] c``
with ``J(t) = [[t, 1], [t - b, t]]``. The derivative of the previous term
is carried exactly with truncated Taylor arithmetic.
"""
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PowerSeries", "Jet", "qss_term", "qss_value", "xplus_at_b", "xplus_display",
    "xminus_display", "xminus_at_b_fit", "ExpansionFit", "compare_expansions",
    "IllConditionedFit", "FIT_EPS3",
]


class IllConditionedFit(ValueError):
    """The least-squares design matrix is too ill-conditioned."""


class PowerSeries:
    """Truncated series ``sum_k coeffs[k] eps^k``, exact below ``order``.

    Powers are of eps, not eps3, so terms like eps^4 and eps^7 fit in.
    """

    def __init__(self, coeffs, order=None):
        c = np.asarray(coeffs, dtype=complex).ravel()
        order = c.size if order is None else int(order)
        out = np.zeros(order, dtype=complex)
        n = min(order, c.size)
        out[:n] = c[:n]
        self.coeffs = out
        self.order = order

    @classmethod
    def from_dict(cls, terms, order):
        c = np.zeros(order, dtype=complex)
        for k, v in terms.items():
            if k < order:
                c[k] = v
        return cls(c, order)

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < self.order else 0.0

    def _lift(self, other):
        if isinstance(other, PowerSeries):
            return other
        return PowerSeries([other], self.order)

    def __add__(self, other):
        other = self._lift(other)
        order = min(self.order, other.order)
        return PowerSeries(self.coeffs[:order] + other.coeffs[:order], order)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self.coeffs, self.order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(self.coeffs * other, self.order)
        order = min(self.order, other.order)
        return PowerSeries(np.convolve(self.coeffs[:order], other.coeffs[:order])[:order], order)

    __rmul__ = __mul__

    def __call__(self, eps):
        return complex(np.polynomial.polynomial.polyval(eps, self.coeffs))

    def nonzero(self, tol=0.0):
        return {k: complex(v) for k, v in enumerate(self.coeffs) if abs(v) > tol}

    def __repr__(self):
        terms = " + ".join(f"({v:.6g}) eps^{k}" for k, v in self.nonzero().items()) or "0"
        return f"PowerSeries({terms} + O(eps^{self.order}))"


class Jet:
    """Truncated Taylor expansion ``sum_k coeffs[k] (t - t0)^k`` up to degree ``degree``."""

    def __init__(self, coeffs, t0=0.0):
        self.coeffs = np.asarray(coeffs, dtype=float).copy()
        self.t0 = t0

    @classmethod
    def variable(cls, t0, degree):
        c = np.zeros(degree + 1)
        c[0] = t0
        if degree >= 1:
            c[1] = 1.0
        return cls(c, t0)

    @classmethod
    def constant(cls, value, t0, degree):
        c = np.zeros(degree + 1)
        c[0] = value
        return cls(c, t0)

    @property
    def degree(self):
        return self.coeffs.size - 1

    @property
    def value(self):
        return float(self.coeffs[0])

    def derivative_value(self, k):
        """k-th derivative at ``t0``."""
        return float(self.coeffs[k] * math.factorial(k)) if k <= self.degree else 0.0

    def derivative(self):
        """Jet of the t-derivative (one degree lower)."""
        k = np.arange(1, self.degree + 1)
        return Jet(self.coeffs[1:] * k, self.t0)

    def truncate(self, degree):
        return Jet(self.coeffs[: degree + 1], self.t0)

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.t0, self.degree)

    def _pair(self, other):
        other = self._lift(other)
        d = min(self.degree, other.degree)
        return self.coeffs[: d + 1], other.coeffs[: d + 1], d

    def __add__(self, other):
        a, b, _ = self._pair(other)
        return Jet(a + b, self.t0)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.t0)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        a, b, d = self._pair(other)
        return Jet(np.convolve(a, b)[: d + 1], self.t0)

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("jet has zero value")
        out = np.zeros_like(a)
        out[0] = 1.0 / a[0]
        for k in range(1, a.size):
            out[k] = -np.dot(a[1: k + 1], out[k - 1:: -1][:k]) / a[0]
        return Jet(out, self.t0)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __repr__(self):
        return f"Jet(t0={self.t0}, coeffs={self.coeffs.tolist()})"


def _qss_chain(params, t, n, m):
    """Jets of X_1 .. X_n at ``t``; X_k carries degree ``m + n - k``."""
    b, c1, c2 = params.b, params.c1, params.c2
    det_value = t * t - t + b
    if det_value == 0:
        raise ZeroDivisionError(f"J(t) is singular at t = {t} (t^2 - t + b = 0)")
    top = m + n - 1
    tj = Jet.variable(t, top)
    inv_det = (tj * tj - tj + b).reciprocal()
    chain = []
    rhs1 = Jet.constant(-c1, t, top)
    rhs2 = Jet.constant(-c2, t, top)
    for k in range(1, n + 1):
        deg = m + n - k
        tk = tj.truncate(deg)
        r1, r2 = rhs1.truncate(deg), rhs2.truncate(deg)
        inv = inv_det.truncate(deg)
        x = (tk * r1 - r2) * inv
        y = (tk * r2 - (tk - b) * r1) * inv
        chain.append((x, y))
        rhs1, rhs2 = x.derivative(), y.derivative()
    return chain


def qss_term(params, t, n, m=1):
    """Jets ``(x_n, y_n)`` of the n-th quasi-stationary term at ``t`` with ``m`` derivatives."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    x, y = _qss_chain(params, float(t), n, m)[-1]
    return x.truncate(m), y.truncate(m)


def qss_value(params, t, terms=1):
    """Partial sum ``sum_{n <= terms} X_n(t) eps3^n`` as ``(x, y)``."""
    chain = _qss_chain(params, float(t), terms, 0)
    x = sum(cx.value * params.eps3 ** k for k, (cx, _) in enumerate(chain, start=1))
    y = sum(cy.value * params.eps3 ** k for k, (_, cy) in enumerate(chain, start=1))
    return x, y


def xplus_at_b(params, order=9):
    """``(x, y)`` PowerSeries in eps of the quasi-stationary expansion at ``t = b``.

    Terms ``eps^{3n}`` with ``3n <= order`` are kept; the series is exact
    below ``order + 1``.
    """
    if order > 9:
        raise ValueError("order must be <= 9")
    n = order // 3
    chain = _qss_chain(params, params.b, n, 0) if n else []
    xs = {3 * k: cx.value for k, (cx, _) in enumerate(chain, start=1)}
    ys = {3 * k: cy.value for k, (_, cy) in enumerate(chain, start=1)}
    return PowerSeries.from_dict(xs, order + 1), PowerSeries.from_dict(ys, order + 1)


def xplus_display(b, c1, c2):
    """Displayed eps3 and eps6 coefficients of X_+(b): ``{3: (x, y), 6: (x, y)}``."""
    return {
        3: (-c1 / b + c2 / b ** 2, -c2 / b),
        6: ((1 / b ** 3 - 2 / b ** 4) * c1 + (-3 / b ** 4 + 2 / b ** 5) * c2,
            c1 / b ** 3 + (1 / b ** 3 - 1 / b ** 4) * c2),
    }


def xminus_display(b, c1, c2):
    """Displayed eps3 and eps6 coefficients of X_-(b), transcribed independently."""
    x3 = (-1.0 / b) * c1 + (1.0 / (b * b)) * c2
    y3 = (-1.0 / b) * c2
    x6 = (b ** -3 - 2.0 * b ** -4) * c1 + (-3.0 * b ** -4 + 2.0 * b ** -5) * c2
    y6 = (b ** -3) * c1 + (b ** -3 - b ** -4) * c2
    return {3: (x3, y3), 6: (x6, y6)}


@dataclass
class ExpansionFit:
    x: PowerSeries
    y: PowerSeries
    eps3_list: tuple
    values: np.ndarray
    fit_residual: float
    closed_residuals: np.ndarray
    residual_slope: float
    condition: float


FIT_EPS3 = (0.0005, 0.00025, 0.000125, 6.25e-5)


def xminus_at_b_fit(template, eps3_list=FIT_EPS3, order=9, rtol=1e-12):
    """Fit the eps3^k coefficients (3k <= order) of X_-(b) from the Airy quadrature.

    ``closed_residuals`` is ``|X_-(b) - closed eps3 and eps6 terms|`` at each
    eps3 and ``residual_slope`` its log-log slope against eps.
    """
    from .cquad import explicit_solution

    eps3_arr = np.array(sorted(set(float(e) for e in eps3_list), reverse=True))
    powers = list(range(3, order + 1, 3))
    if eps3_arr.size < len(powers) + 1:
        raise ValueError(f"need at least {len(powers) + 1} distinct eps3 values for order {order}")
    if eps3_arr.max() > 0.002:
        raise ValueError("eps3 values must not exceed 0.002")
    values = np.array([explicit_solution(template.replace(eps3=e), template.b, "-", rtol=rtol)
                       for e in eps3_arr])
    eps = eps3_arr ** (1.0 / 3.0)
    design = eps[:, None] ** np.array(powers)[None, :]
    scale = np.abs(design).max(axis=0)
    cond = float(np.linalg.cond(design / scale))
    if cond > 1e10:
        raise IllConditionedFit(f"condition number {cond:.3g} > 1e10; use more spread eps3 values")
    coef, *_ = np.linalg.lstsq(design / scale, values, rcond=None)
    coef = coef / scale[:, None]
    fit_res = float(np.linalg.norm(design @ coef - values))
    closed = xplus_display(template.b, template.c1, template.c2)
    model = np.array([[closed[3][i] * e + closed[6][i] * e * e for i in (0, 1)] for e in eps3_arr])
    closed_res = np.linalg.norm(values - model, axis=1)
    slope = float(np.polyfit(np.log(eps), np.log(closed_res), 1)[0]) if eps.size >= 2 else math.nan
    xs = PowerSeries.from_dict(dict(zip(powers, coef[:, 0])), order + 1)
    ys = PowerSeries.from_dict(dict(zip(powers, coef[:, 1])), order + 1)
    return ExpansionFit(xs, ys, tuple(eps3_arr), values, fit_res, closed_res, slope, cond)


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def compare_expansions(params, order=9, eps3_list=FIT_EPS3, samples=20, seed=0):
    """Compare the two displayed expansions and the quadrature fit at ``t = b``.

    Returns a dict with ``display`` (max relative gap between the two
    displays over ``samples`` admissible (b, c1, c2)), ``recurrence`` (gap
    between the recurrence and the display at ``params``), ``fit`` (max
    relative gap of fitted vs closed coefficients at eps3 and eps6) and the
    :class:`ExpansionFit`.
    """
    rng = np.random.default_rng(seed)
    display_gap = 0.0
    for _ in range(samples):
        b = rng.uniform(0.26, 0.78)
        c1, c2 = rng.uniform(-2, 2, size=2)
        p, m = xplus_display(b, c1, c2), xminus_display(b, c1, c2)
        for k in (3, 6):
            for i in (0, 1):
                display_gap = max(display_gap, _rel(p[k][i], m[k][i]))
    closed = xplus_display(params.b, params.c1, params.c2)
    xs, ys = xplus_at_b(params, 6)
    rec_gap = max(_rel(xs[k].real, closed[k][0]) for k in (3, 6))
    rec_gap = max(rec_gap, max(_rel(ys[k].real, closed[k][1]) for k in (3, 6)))
    if params.c1 == 0 and params.c2 == 0:
        return {"display": display_gap, "recurrence": rec_gap, "fit": 0.0, "fit_detail": None}
    fit = xminus_at_b_fit(params, eps3_list, order)
    fit_gap = 0.0
    for k in (3, 6):
        fit_gap = max(fit_gap, _rel(fit.x[k].real, closed[k][0]), _rel(fit.y[k].real, closed[k][1]))
    return {"display": display_gap, "recurrence": rec_gap, "fit": fit_gap, "fit_detail": fit}
