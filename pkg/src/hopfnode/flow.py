"""Real-time integration of the normal form and the exponential microscope.

The system is ``eps3 x' = t x + y + eps3 c1``, ``eps3 y' = (t - b) x + t y + eps3 c2``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import rk4_linear
from .series import qss_value

__all__ = [
    "Trajectory", "MicroscopeTrack", "StepSizeError", "rk4", "distinguished", "exit_time",
    "oscillation_onset", "to_microscope", "theta_slow_branches", "averaged_rho_rate",
]

STEP_GUARD = 0.1
PERTURBATION = 1e-6


class StepSizeError(ValueError):
    """The step violates ``0 < h <= 0.1 eps3``."""


@dataclass
class Trajectory:
    """Samples ``(t, x, y)`` in traversal order.

    ``halted`` is set when the integration stopped early on overflow;
    the arrays then end at the last finite sample.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    h: float
    params: object
    halted: bool = False
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.t.size

    @property
    def samples(self):
        return np.column_stack([self.t, self.x, self.y])

    @property
    def norm_inf(self):
        return np.maximum(np.abs(self.x), np.abs(self.y))

    @property
    def direction(self):
        return 1.0 if self.t.size < 2 or self.t[-1] > self.t[0] else -1.0

    def at(self, t):
        """Linear interpolation of ``(x, y)`` at ``t``."""
        order = np.argsort(self.t)
        ts = self.t[order]
        if not ts[0] <= t <= ts[-1]:
            raise ValueError(f"t = {t} outside the trajectory span [{ts[0]}, {ts[-1]}]")
        return float(np.interp(t, ts, self.x[order])), float(np.interp(t, ts, self.y[order]))


@dataclass
class MicroscopeTrack:
    """``rho = eps ln |X|_2`` and unwrapped polar angle ``theta`` per sample."""

    t: np.ndarray
    rho: np.ndarray
    theta: np.ndarray
    eps: float

    def reconstruct(self):
        r = np.exp(self.rho / self.eps)
        return r * np.cos(self.theta), r * np.sin(self.theta)


def rk4(params, t0, X0, t1, h):
    """Classical fixed-step RK4 from ``(t0, X0)`` to ``t1`` (either direction).

    The number of steps is ``ceil(|t1 - t0| / h)``; the step is shrunk to
    land on ``t1`` exactly.
    """
    if not h > 0:
        raise StepSizeError(f"step must be positive, got {h}")
    if h > STEP_GUARD * params.eps3 * (1 + 1e-12):
        raise StepSizeError(f"step {h} exceeds {STEP_GUARD} * eps3 = {STEP_GUARD * params.eps3}")
    if t1 == t0:
        raise ValueError("t1 must differ from t0")
    span = t1 - t0
    n = int(math.ceil(abs(span) / h - 1e-9))
    step = span / n
    ts, xs, ys, nvalid = rk4_linear(float(t0), float(X0[0]), float(X0[1]), step, n,
                                    params.eps3, params.b, params.c1, params.c2)
    ts, xs, ys = (np.asarray(a)[:nvalid].copy() for a in (ts, xs, ys))
    return Trajectory(ts, xs, ys, abs(step), params, halted=nvalid < n + 1)


def distinguished(params, sign="-", t_far=4.0, t_end=None, h=1e-4, check=True):
    """Approximation of X_- (forward from ``-|t_far|``) or X_+ (backward from ``+|t_far|``).

    Seeded at the first quasi-stationary term. With ``check`` a second run
    from a seed shifted by 1e-6 measures the contraction at ``t_far / 2``;
    ``meta['contraction']`` is the ratio of final to initial separation.
    """
    sign = {"minus": "-", "plus": "+"}.get(sign, sign)
    if sign not in ("-", "+"):
        raise ValueError(f"sign must be '-' or '+', got {sign!r}")
    if abs(t_far) < 3:
        raise ValueError("|t_far| must be >= 3")
    start = -abs(t_far) if sign == "-" else abs(t_far)
    if t_end is None:
        t_end = 1.0 if sign == "-" else -1.0
    seed = qss_value(params, start)
    traj = rk4(params, start, seed, t_end, h)
    traj.meta["sign"] = sign
    if check:
        half = start / 2
        a = rk4(params, start, seed, half, h)
        b = rk4(params, start, (seed[0] + PERTURBATION, seed[1] + PERTURBATION), half, h)
        gap = math.hypot(a.x[-1] - b.x[-1], a.y[-1] - b.y[-1])
        traj.meta["contraction"] = gap / (PERTURBATION * math.sqrt(2.0))
    return traj


def exit_time(traj, delta):
    """First time ``|X|_inf > delta`` after a dwell of 0.1 time units at ``<= delta / 2``.

    Times are taken in traversal order; ``None`` if there is no exit.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    armed = _dwell_index(traj, delta)
    if armed is None:
        return None
    above = np.nonzero(traj.norm_inf[armed:] > delta)[0]
    return float(traj.t[armed + above[0]]) if above.size else None


def _dwell_index(traj, delta):
    """First sample ending a 0.1-long run at ``|X|_inf <= delta / 2``."""
    t = traj.t
    inside = traj.norm_inf <= 0.5 * delta
    run_start = None
    armed = None
    for i in range(t.size):
        if inside[i]:
            if run_start is None:
                run_start = i
            if abs(t[i] - t[run_start]) >= 0.1:
                armed = i
                break
        else:
            run_start = None
    return armed


def oscillation_onset(traj, delta=0.05):
    """First zero crossing of ``x`` not shared by the slow curve, after the exit dwell.

    The slow-curve value of ``x`` keeps its sign between the two samples,
    so the crossing comes from the oscillating part. ``None`` if none.
    """
    armed = _dwell_index(traj, delta)
    if armed is None:
        return None
    p = traj.params
    t, x = traj.t[armed:], traj.x[armed:]
    slow = (-p.c1 * t + p.c2) / (t * t - t + p.b)
    flip = np.sign(x[1:]) != np.sign(x[:-1])
    steady = np.sign(slow[1:]) == np.sign(slow[:-1])
    hits = np.nonzero(flip & steady)[0]
    return float(t[hits[0] + 1]) if hits.size else None


def to_microscope(traj, params):
    """Exponential-microscope coordinates of a trajectory."""
    r = np.hypot(traj.x, traj.y)
    zero = np.nonzero(r == 0)[0]
    if zero.size:
        raise ValueError(f"trajectory vanishes at t = {traj.t[zero[0]]}")
    theta = np.unwrap(np.arctan2(traj.y, traj.x))
    return MicroscopeTrack(traj.t.copy(), params.eps * np.log(r), theta, params.eps)


def theta_slow_branches(t, params):
    """Angles of the slow curve of the angular equation: ``()`` for ``t < b``."""
    d = t - params.b
    if d < 0:
        return ()
    root = math.atan(math.sqrt(d))
    return (root, -root)


def averaged_rho_rate(t, params, rho=-0.03, n=256):
    """Average of the radial rate over one turn of the angle, weighted by time spent.

    Uses the leading-order radial and angular rates of the normal form with
    ``alpha = delta = t``, ``beta = 1``, ``gamma = t - b``; the exponentially
    small remainders vanish for the linear system. ``rho`` only fixes the
    regime and must be negative.
    """
    if not rho < 0:
        raise ValueError("rho must be negative")
    theta = 2 * math.pi * np.arange(n) / n
    c, s = np.cos(theta), np.sin(theta)
    rho_rate = t * c * c + (1.0 + t - params.b) * c * s + t * s * s
    theta_rate = (t - params.b) * c * c - s * s
    if np.any(theta_rate >= 0) or np.min(np.abs(theta_rate)) < 1e-14:
        raise ValueError(f"angular rate vanishes on the period at t = {t}")
    return float(np.sum(rho_rate / theta_rate) / np.sum(1.0 / theta_rate))
