"""Eigenvalues, branch determinations and closed-form reliefs.

Two systems are covered. The focus-node normal form

    eps3 x' = t x + y + eps3 c1,   eps3 y' = (t - b) x + t y + eps3 c2

has Jacobian ``J(t) = [[t, 1], [t - b, t]]`` with eigenvalues
``t -/+ (t - b)**(1/2)``. The pure Hopf example has eigenvalues ``t -/+ i``.
Reliefs are real parts of the eigenvalue primitives with base point 0.
"""
import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "Params", "Determination", "EigenPair", "ReliefValue", "Relief",
    "HypothesisError", "CutLineAmbiguity", "HypothesisReport",
    "B_UPPER", "branch_power", "eigenvalues", "relief", "critical_point",
    "critical_points", "real_crossings", "hopf_relief", "hopf_relief_object",
    "check_hypotheses", "HOPF_BUMP", "HOPF_ANTIBUMP",
]

B_UPPER = 0.5 + math.sqrt(3.0) / 6.0
HOPF_BUMP = 1.0
HOPF_ANTIBUMP = -1.0


class HypothesisError(ValueError):
    """A parameter violates one of the standing hypotheses."""


class CutLineAmbiguity(ValueError):
    """Evaluation exactly on a branch cut; both one-sided values attached."""

    def __init__(self, t, low, high):
        self.t = t
        self.low = low
        self.high = high
        super().__init__(
            f"t = {t} lies on the branch cut; one-sided values: "
            f"low side {low!r}, high side {high!r} (pass side='low' or side='high')")


@dataclass(frozen=True)
class Params:
    """Normal-form data. ``eps3`` is the small parameter epsilon**3."""

    b: float = 0.3
    c1: float = 0.0
    c2: float = -1.0
    eps3: float = 0.002
    hyp_b1: bool = field(init=False)
    hyp_b: bool = field(init=False)

    def __post_init__(self):
        if not self.eps3 > 0:
            raise ValueError(f"eps3 must be positive, got {self.eps3}")
        object.__setattr__(self, "hyp_b1", self.b > 0.25)
        object.__setattr__(self, "hyp_b", 0.25 < self.b < B_UPPER)

    @property
    def eps(self):
        return self.eps3 ** (1.0 / 3.0)

    @property
    def c(self):
        return (self.c1, self.c2)

    def replace(self, **changes):
        kw = dict(b=self.b, c1=self.c1, c2=self.c2, eps3=self.eps3)
        kw.update(changes)
        return Params(**kw)


class Determination(Enum):
    """Branch of ``w**(1/2)``: the argument range of ``w = r e^{i theta}``."""

    POSITIVE = (0.0, 2.0 * math.pi)
    SHIFTED = (-0.5 * math.pi, 1.5 * math.pi)

    @property
    def lo(self):
        return self.value[0]

    @property
    def hi(self):
        return self.value[1]

    def arg(self, w, side=None):
        """Argument of ``w`` in ``[lo, hi)``; ``side='high'`` maps the cut to ``hi``."""
        w = np.asarray(w, dtype=complex)
        theta = np.angle(w)
        theta = np.where(theta < self.lo, theta + 2.0 * math.pi, theta)
        theta = np.where(theta >= self.hi, theta - 2.0 * math.pi, theta)
        if side == "high":
            theta = np.where(self.on_cut(w), self.hi, theta)
        return theta

    def on_cut(self, w):
        """True where ``w`` sits on the ray ``arg w = lo`` (excluding 0)."""
        w = np.asarray(w, dtype=complex)
        if self is Determination.POSITIVE:
            return (w.imag == 0) & (w.real > 0)
        return (w.real == 0) & (w.imag < 0)


def branch_power(w, p, branch=Determination.POSITIVE, side=None):
    """``r**p * exp(i p theta)`` with theta in the branch's range."""
    w = np.asarray(w, dtype=complex)
    theta = branch.arg(w, side)
    r = np.abs(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = r ** p * np.exp(1j * p * theta)
    return np.where(r == 0, 0.0, out)


@dataclass(frozen=True)
class EigenPair:
    lam: complex
    mu: complex
    t: complex
    branch: Determination


def eigenvalues(t, b, branch=Determination.POSITIVE):
    """lambda = t - (t-b)^(1/2), mu = t + (t-b)^(1/2) under ``branch``."""
    t = complex(t)
    root = complex(branch_power(t - b, 0.5, branch))
    return EigenPair(lam=t - root, mu=t + root, t=t, branch=branch)


@dataclass(frozen=True)
class ReliefValue:
    F: complex
    R: float
    which: str


def _which(which):
    key = str(which).lower()
    if key in ("lambda", "lam", "l", "λ"):
        return "lambda"
    if key in ("mu", "m", "μ"):
        return "mu"
    raise ValueError(f"which must be 'lambda' or 'mu', got {which!r}")


@dataclass(frozen=True)
class Relief:
    """A relief ``R = Re F`` with ``F' =`` eigenvalue, evaluated on arrays.

    ``system`` is ``"hfn"`` (focus-node normal form) or ``"hopf"``.
    """

    which: str = "lambda"
    b: float = 0.3
    branch: Determination = Determination.POSITIVE
    system: str = "hfn"

    def __post_init__(self):
        object.__setattr__(self, "which", _which(self.which))
        if self.system not in ("hfn", "hopf"):
            raise ValueError(f"unknown system {self.system!r}")

    @property
    def sign(self):
        return -1.0 if self.which == "lambda" else 1.0

    def conjugate(self):
        """The mirror relief: R_mu(t) = R_lambda(conj t) off the cut."""
        other = "mu" if self.which == "lambda" else "lambda"
        return Relief(other, self.b, self.branch, self.system)

    def on_cut(self, t):
        t = np.asarray(t, dtype=complex)
        if self.system == "hopf":
            return np.zeros(t.shape, dtype=bool)
        return self.branch.on_cut(t - self.b)

    def F(self, t, side=None):
        t = np.asarray(t, dtype=complex)
        if self.system == "hopf":
            return 0.5 * (t + self.sign * 1j) ** 2
        b = self.b
        p32 = branch_power(t - b, 1.5, self.branch, side)
        return 0.5 * t * t + self.sign * (2.0 / 3.0) * (p32 + 1j * b ** 1.5)

    def R(self, t, side=None):
        return np.real(self.F(t, side))

    def slope(self, t, side=None):
        """dF/dt, the eigenvalue itself."""
        t = np.asarray(t, dtype=complex)
        if self.system == "hopf":
            return t + self.sign * 1j
        return t + self.sign * branch_power(t - self.b, 0.5, self.branch, side)

    def __call__(self, t, side=None):
        return self.R(t, side)


def relief(t, b, which="lambda", branch=Determination.POSITIVE, side=None):
    """F_lambda or F_mu at ``t``; on the cut a ``side`` must be chosen.

    ``side='low'`` takes the argument at the bottom of the branch range
    (for the positive-axis cut: the limit from the upper half plane, the
    ``arg = 0`` sheet), ``side='high'`` the top (``arg = 2 pi``).
    """
    rel = Relief(which, b, branch)
    t = complex(t)
    if side is None and bool(rel.on_cut(t)):
        lo = complex(rel.F(t, "low"))
        hi = complex(rel.F(t, "high"))
        raise CutLineAmbiguity(t, ReliefValue(lo, lo.real, rel.which), ReliefValue(hi, hi.real, rel.which))
    F = complex(rel.F(t, side))
    return ReliefValue(F=F, R=F.real, which=rel.which)


def critical_point(b):
    """The critical point of R_lambda and its critical value.

    Returns ``(t_c, R_c)`` with ``t_c = 1/2 + i sqrt(b - 1/4)`` and
    ``R_c = b/2 - 1/12``.
    """
    if not b > 0.25:
        raise HypothesisError(f"b = {b} must exceed 1/4 for a complex critical point")
    t_c = complex(0.5, math.sqrt(b - 0.25))
    return t_c, 0.5 * b - 1.0 / 12.0


def critical_points(b, which="lambda", branch=Determination.POSITIVE):
    """All zeros of the chosen eigenvalue (roots of t^2 - t + b on its sheet)."""
    rel = Relief(which, b, branch)
    roots = np.roots([1.0, -1.0, b])
    out = []
    for r in roots:
        r = complex(r)
        sides = ("low", "high") if bool(rel.on_cut(r)) else (None,)
        for side in sides:
            if abs(complex(rel.slope(r, side))) < 1e-9 * (1 + abs(r)):
                out.append(r)
                break
    return out


def real_crossings(b):
    """Real solutions of R_lambda(t) = R_c.

    Returns ``(t_e, t_s1, t_s2)``: ``t_e = -sqrt(b - 1/6)``, ``t_s1`` on the
    ``arg = 2 pi`` sheet (``t^2/2 + 2/3 (t-b)^(3/2) = R_c``) and ``t_s2`` on
    the ``arg = 0`` sheet (``t^2/2 - 2/3 (t-b)^(3/2) = R_c``).
    """
    if not 0.25 < b < B_UPPER:
        raise HypothesisError(f"b = {b} outside (1/4, 1/2 + sqrt(3)/6): no two-exit regime")
    t_c, r_c = critical_point(b)
    t_e = -math.sqrt(b - 1.0 / 6.0)

    def g1(t):
        return 0.5 * t * t + (2.0 / 3.0) * max(t - b, 0.0) ** 1.5 - r_c

    def g2(t):
        return 0.5 * t * t - (2.0 / 3.0) * max(t - b, 0.0) ** 1.5 - r_c

    lo, hi = b + 1e-12, t_c.real + 2.0
    roots = []
    for g, sgn in ((g1, 1.0), (g2, -1.0)):
        x = brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        for _ in range(2):  # Newton polish
            d = x + sgn * math.sqrt(max(x - b, 0.0))
            if d != 0:
                x -= g(x) / d
        roots.append(x)
    return t_e, roots[0], roots[1]


def hopf_relief_object(which="lambda"):
    return Relief(which, system="hopf")


def hopf_relief(t, which="lambda"):
    """Relief of the pure Hopf example: R_lambda = Re((t - i)^2 / 2).

    The bump and anti-bump are ``HOPF_BUMP = 1`` and ``HOPF_ANTIBUMP = -1``.
    """
    F = complex(hopf_relief_object(which).F(complex(t)))
    return ReliefValue(F=F, R=F.real, which=_which(which))


@dataclass
class HypothesisReport:
    b: float
    b_gt_quarter: bool
    b_in_two_exit_range: bool
    relief_b_below_critical: bool
    critical_point_count: int
    bump_before_focus_node: bool
    t_c: complex = None
    R_c: float = None
    bump: float = None
    notes: list = field(default_factory=list)

    @property
    def all_pass(self):
        return self.b_gt_quarter and self.b_in_two_exit_range and self.relief_b_below_critical

    def lines(self):
        flag = {True: "pass", False: "FAIL"}
        out = [
            f"b > 1/4                        : {flag[self.b_gt_quarter]}",
            f"1/4 < b < 1/2 + sqrt(3)/6      : {flag[self.b_in_two_exit_range]}",
            f"R_lambda(b) < R_c              : {flag[self.relief_b_below_critical]}",
            f"critical points of R_lambda    : {self.critical_point_count}",
        ]
        if self.bump_before_focus_node:
            out.append(f"bump t* = {self.bump:.6f} <= b: pure Hopf input-output relation applies")
        out.extend(self.notes)
        return out


def check_hypotheses(params):
    """Evaluate the standing hypotheses for ``params.b``; never raises."""
    b = params.b if isinstance(params, Params) else float(params)
    gt_quarter = b > 0.25
    in_range = 0.25 < b < B_UPPER
    notes = []
    t_c = r_c = bump = None
    below = False
    count = len(critical_points(b))
    if gt_quarter:
        t_c, r_c = critical_point(b)
        below = 0.5 * b * b < r_c
    else:
        notes.append("no complex critical point: eigenvalues real on part of t < b")
    if count != 1:
        notes.append(f"R_lambda has {count} critical points; no claims are made")
    before = False
    if gt_quarter and not below:
        # R(t) = t^2/2 on t < b, so the first real t > 0 with R = R_c is sqrt(2 R_c)
        bump = math.sqrt(2.0 * r_c)
        before = bump <= b
    return HypothesisReport(
        b=b, b_gt_quarter=gt_quarter, b_in_two_exit_range=in_range,
        relief_b_below_critical=below, critical_point_count=count,
        bump_before_focus_node=before, t_c=t_c, R_c=r_c, bump=bump, notes=notes)
