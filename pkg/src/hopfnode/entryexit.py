"""Entrance-exit relations and their empirical measurement."""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .flow import exit_time, rk4
from .series import qss_value
from .spectrum import HypothesisError, check_hypotheses, real_crossings

__all__ = [
    "IoResult", "NoExitError", "hopf_canard_exit", "hopf_bump_relation", "hfn_band",
    "conjectured_exit", "measure_exit", "HOPF_BUMP", "HOPF_ANTIBUMP",
]

HOPF_BUMP = 1.0
HOPF_ANTIBUMP = -1.0
KINDS = ("point", "interval", "any-beyond")


class NoExitError(RuntimeError):
    """The trajectory never left the neighbourhood of the slow curve."""


@dataclass(frozen=True)
class IoResult:
    """An exit prediction: a point, an ordered interval, or a lower bound."""

    kind: str
    values: tuple
    rule: str
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        need = 2 if self.kind == "interval" else 1
        if len(self.values) != need:
            raise ValueError(f"{self.kind} needs {need} value(s)")
        if self.kind == "interval" and self.values[0] > self.values[1]:
            raise ValueError("interval endpoints must be ordered")

    @property
    def value(self):
        return self.values[0]


def hopf_canard_exit(re_lambda, t_e, t_max=10.0):
    """Exit ``t_s`` with zero integral of ``re_lambda`` over ``[t_e, t_s]``."""
    if not re_lambda(t_e) < 0:
        raise ValueError("need Re lambda(t_e) < 0")
    turn = _first_sign_change(re_lambda, t_e, t_max)
    if turn is None:
        raise ValueError("Re lambda never becomes positive before t_max")
    a = brentq(re_lambda, *turn, xtol=1e-14)

    def area(s):
        return quad(re_lambda, t_e, s, epsabs=1e-13, epsrel=1e-12, limit=200)[0]

    bracket = _first_sign_change(area, a, t_max)
    if bracket is None:
        raise ValueError(f"no exit before t = {t_max}")
    return IoResult("point", (brentq(area, *bracket, xtol=1e-12),), "zero-area")


def _first_sign_change(fn, lo, hi, n=2000):
    grid = np.linspace(lo, hi, n + 1)
    prev = fn(grid[0])
    for a, b in zip(grid[:-1], grid[1:]):
        cur = fn(b)
        if prev <= 0 < cur:
            return a, b
        prev = cur
    return None


def hopf_bump_relation(t_e):
    """Exit for the pure Hopf example with bump 1 and anti-bump -1."""
    if not t_e < 0:
        raise ValueError("t_e must be negative")
    if t_e < HOPF_ANTIBUMP:
        return IoResult("point", (HOPF_BUMP,), "capped at the bump")
    if t_e == HOPF_ANTIBUMP:
        return IoResult("any-beyond", (HOPF_BUMP,), "entry at the anti-bump")
    return IoResult("point", (-t_e,), "equal relief")


def _band_end(b, level, sign):
    """Root ``s > b`` of ``s^2 / 2 + sign * (2/3)(s - b)^{3/2} = level``."""
    def g(s):
        return 0.5 * s * s + sign * (2.0 / 3.0) * max(s - b, 0.0) ** 1.5 - level

    hi = b + 1.0
    while g(hi) < 0:
        hi *= 2
    return brentq(g, b, hi, xtol=1e-13)


def hfn_band(params, t_e):
    """Exit prediction for a big canard entering at ``t_e``.

    Below ``b`` both eigenvalues have real part ``t``, so ``-t_e <= b`` gives
    a point. Otherwise the exit lies between the zero-area times of the two
    real eigenvalues. Entries before the anti-bump cannot sustain tracking
    past the bumps; the interval is capped there and flagged open-ended.
    """
    report = check_hypotheses(params)
    if not report.all_pass:
        raise HypothesisError("; ".join(report.lines()))
    if not t_e < 0:
        raise ValueError("t_e must be negative")
    b = params.b
    if -t_e <= b:
        return IoResult("point", (-t_e,), "equal real parts below b")
    level = 0.5 * t_e * t_e
    anti, s1, s2 = real_crossings(b)
    if t_e < anti:
        return IoResult("interval", (s1, s2), "capped at the bumps", {"open_ended": True})
    lo = _band_end(b, level, +1.0)
    hi = _band_end(b, level, -1.0)
    return IoResult("interval", (lo, hi), "zero-area band", {"open_ended": False})


def conjectured_exit(params, t_e):
    """Conjectured exit ``min(-t_e, b)``."""
    if not t_e < 0:
        raise ValueError("t_e must be negative")
    return IoResult("point", (min(-t_e, params.b),), "relief capped at b")


def measure_exit(params, t_e, r0=1e-6, delta=0.05, h=1e-4, t_max=2.0):
    """Simulated exit time for a trajectory entering at ``t_e``.

    Starts at the first quasi-stationary term plus ``(r0, 0)`` and returns
    :func:`hopfnode.flow.exit_time` of the RK4 trajectory.
    """
    if not t_e < 0:
        raise ValueError("t_e must be negative")
    if not 1e-8 <= r0 <= 1e-3:
        raise ValueError("r0 must lie in [1e-8, 1e-3]")
    if delta < 100 * r0:
        raise ValueError("delta must be at least 100 * r0")
    x1, y1 = qss_value(params, t_e)
    traj = rk4(params, t_e, (x1 + r0, y1), t_max, h)
    t_s = exit_time(traj, delta)
    if t_s is None:
        raise NoExitError(f"no exit before t = {t_max} for t_e = {t_e}")
    return t_s
