"""Complex Airy functions, log-scaled values and the Airy fundamental matrix.

Ai and Ai' are evaluated by region:

* ``|z| <= 3`` (or ``|z| <= 6`` away from the recessive sector): Maclaurin
  series of ``w'' = z w``;
* ``|z| >= 12``: the asymptotic expansion with optimal truncation, combined
  through ``Ai(z) = -j Ai(jz) - j^2 Ai(j^2 z)`` for ``|arg z| > 2 pi/3``;
* in between, Taylor-series marching of the ODE: inward from ``|z| = 12``
  in the recessive sector ``|arg z| < pi/3`` and outward from ``|z| = 5``
  elsewhere, always in the numerically stable direction.

Bi is built from Ai through the rotation identity, so only Ai has its own
code path. Large arguments are carried as complex logarithms; the public
scalar representation of such values is :class:`LogComplex`.
"""
import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels

__all__ = [
    "AiryKind", "AiryRangeError", "LogComplex", "FundamentalMatrix",
    "J", "J2", "AI0", "AIP0", "BI0", "BIP0",
    "airy", "airy_scaled", "airy_log", "ai_log_pair",
    "connection_residual", "base_determinant", "fundamental_matrix",
    "logsumexp_complex",
]

TWO_PI = 2.0 * math.pi
J = cmath.exp(2j * math.pi / 3)
J2 = J * J

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (1.0 / 6.0)) / 2.0 * math.gamma(2.0 / 3.0) / math.pi
BI0 = 3.0 ** (-1.0 / 6.0) / math.gamma(2.0 / 3.0)
BIP0 = 3.0 ** (2.0 / 3.0) / 2.0 * math.gamma(2.0 / 3.0) / math.pi

R_SERIES_RECESSIVE = 3.0
R_SERIES = 6.0
R_OUTWARD_START = 5.0
R_ASYMPTOTIC = 12.0
MARCH_STEP = 0.75
DIRECT_LIMIT = 30.0

_LOG_2SQRTPI = math.log(2.0 * math.sqrt(math.pi))


class AiryKind(Enum):
    A = "A"
    AP = "A'"
    B = "B"
    BP = "B'"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().replace("′", "'").upper()
        aliases = {"A": cls.A, "AI": cls.A, "A'": cls.AP, "AP": cls.AP, "AIP": cls.AP,
                   "B": cls.B, "BI": cls.B, "B'": cls.BP, "BP": cls.BP, "BIP": cls.BP}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown Airy kind {value!r}; use one of A, A', B, B'") from None


class AiryRangeError(OverflowError):
    """Raised when a direct Airy value could overflow; use ``airy_scaled``."""


@dataclass(frozen=True)
class LogComplex:
    """A complex number stored as ``exp(logmag + i*phase)``.

    ``logmag = -inf`` encodes zero. ``phase`` is kept in ``[0, 2*pi)``.
    """

    logmag: float
    phase: float = 0.0

    def __post_init__(self):
        phase = 0.0 if self.logmag == -math.inf else math.fmod(self.phase, TWO_PI)
        if phase < 0.0:
            phase += TWO_PI
        if phase >= TWO_PI:
            phase = 0.0
        object.__setattr__(self, "logmag", float(self.logmag))
        object.__setattr__(self, "phase", phase)

    @classmethod
    def from_complex(cls, value):
        value = complex(value)
        if value == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(value)), cmath.phase(value))

    @classmethod
    def from_log(cls, log_value):
        log_value = complex(log_value)
        return cls(log_value.real, log_value.imag)

    @property
    def log(self):
        """Complex logarithm ``logmag + i*phase``."""
        if self.logmag == -math.inf:
            return complex(-math.inf, 0.0)
        return complex(self.logmag, self.phase)

    def to_complex(self):
        if self.logmag == -math.inf:
            return 0j
        return cmath.rect(math.exp(self.logmag), self.phase)

    __complex__ = to_complex

    def __abs__(self):
        return math.exp(self.logmag)

    def __mul__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return LogComplex(self.logmag + other.logmag, self.phase + other.phase)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        if other.logmag == -math.inf:
            raise ZeroDivisionError("division by LogComplex zero")
        return LogComplex(self.logmag - other.logmag, self.phase - other.phase)

    def __add__(self, other):
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return LogComplex.from_log(logsumexp_complex([self.log, other.log]))

    __radd__ = __add__

    def __neg__(self):
        return LogComplex(self.logmag, self.phase + math.pi)

    def conjugate(self):
        return LogComplex(self.logmag, -self.phase)


def logsumexp_complex(logs, weights=None, axis=None):
    """``log(sum(weights * exp(logs)))`` for complex logarithms.

    The real parts are shifted by their maximum before exponentiating, so
    terms of any size can be combined. Zero terms are ``-inf`` logs.
    """
    logs = np.asarray(logs, dtype=complex)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        m = np.max(logs.real, axis=axis, keepdims=True)
        m = np.where(np.isfinite(m), m, 0.0)
        terms = np.exp(logs - m)
        if weights is not None:
            terms = terms * weights
        total = np.sum(terms, axis=axis, keepdims=True)
        out = np.log(total) + m
    if axis is None:
        return complex(out.reshape(()))
    return np.squeeze(out, axis=axis)


def _asymptotic_log(z):
    """log Ai(z), log Ai'(z) from the large-|z| expansion, |arg z| <= 2 pi/3."""
    zeta = (2.0 / 3.0) * z ** 1.5
    s = np.ones_like(z)
    t = np.ones_like(z)
    u = 1.0
    zk = np.ones_like(z)
    best = np.full(z.shape, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, 60):
        u = u * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        zk = zk * (-zeta)
        term_s = u / zk
        mag = np.abs(term_s)
        # optimal truncation: stop each element once its terms start growing
        active &= mag < best
        best = np.where(active, mag, best)
        s = np.where(active, s + term_s, s)
        t = np.where(active, t + v / zk, t)
        active &= mag > 1e-18
        if not active.any():
            break
    quarter = 0.25 * np.log(z)
    log_ai = -zeta - _LOG_2SQRTPI - quarter + np.log(s)
    log_aip = -zeta - _LOG_2SQRTPI + quarter + np.log(-t)
    return log_ai, log_aip


def _large_log(z):
    """Asymptotic region, any argument."""
    log_ai = np.empty_like(z)
    log_aip = np.empty_like(z)
    theta = np.angle(z)
    direct = np.abs(theta) <= 2.0 * math.pi / 3.0 + 1e-12
    if direct.any():
        log_ai[direct], log_aip[direct] = _asymptotic_log(z[direct])
    rot = ~direct
    if rot.any():
        zr = z[rot]
        la1, lp1 = _asymptotic_log(J * zr)
        la2, lp2 = _asymptotic_log(J2 * zr)
        # Ai(z) = -j Ai(jz) - j^2 Ai(j^2 z); Ai'(z) = -j^2 Ai'(jz) - j Ai'(j^2 z)
        pair = np.stack([la1, la2])
        log_ai[rot] = logsumexp_complex(pair, weights=np.array([-J, -J2])[:, None], axis=0)
        pair = np.stack([lp1, lp2])
        log_aip[rot] = logsumexp_complex(pair, weights=np.array([-J2, -J])[:, None], axis=0)
    return log_ai, log_aip


def _moderate_values(z):
    """Ai, Ai' as plain complex numbers for |z| < R_ASYMPTOTIC."""
    ai = np.empty_like(z)
    aip = np.empty_like(z)
    r = np.abs(z)
    recessive = np.abs(np.angle(z)) < math.pi / 3.0
    series = (r <= R_SERIES_RECESSIVE) | (~recessive & (r <= R_SERIES))
    if series.any():
        ai[series], aip[series] = kernels.airy_maclaurin(z[series])
    inward = recessive & ~series
    if inward.any():
        zt = z[inward]
        unit = zt / np.abs(zt)
        z0 = R_ASYMPTOTIC * unit
        la, lp = _asymptotic_log(z0)
        nsteps = int(math.ceil(np.max(R_ASYMPTOTIC - np.abs(zt)) / MARCH_STEP))
        ai[inward], aip[inward] = kernels.airy_ode_march(z0, np.exp(la), np.exp(lp), zt, max(nsteps, 1))
    outward = ~recessive & ~series
    if outward.any():
        zt = z[outward]
        z0 = R_OUTWARD_START * zt / np.abs(zt)
        w0, dw0 = kernels.airy_maclaurin(z0)
        nsteps = int(math.ceil(np.max(np.abs(zt) - R_OUTWARD_START) / MARCH_STEP))
        ai[outward], aip[outward] = kernels.airy_ode_march(z0, w0, dw0, zt, max(nsteps, 1))
    return ai, aip


def ai_log_pair(z):
    """Complex logarithms of Ai(z) and Ai'(z), elementwise.

    Zeros give ``-inf`` real parts. Works for any finite complex ``z``.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.reshape(-1)
    log_ai = np.empty_like(z)
    log_aip = np.empty_like(z)
    large = np.abs(z) >= R_ASYMPTOTIC
    with np.errstate(divide="ignore", invalid="ignore"):
        if large.any():
            log_ai[large], log_aip[large] = _large_log(z[large])
        small = ~large
        if small.any():
            ai, aip = _moderate_values(z[small])
            log_ai[small] = np.log(ai)
            log_aip[small] = np.log(aip)
    return log_ai.reshape(shape), log_aip.reshape(shape)


_E_PI6 = cmath.exp(1j * math.pi / 6)


def airy_log(z, kind="A"):
    """Complex logarithm of the Airy function ``kind`` at ``z`` (vectorized)."""
    kind = AiryKind.parse(kind)
    z = np.asarray(z, dtype=complex)
    if kind is AiryKind.A:
        return ai_log_pair(z)[0]
    if kind is AiryKind.AP:
        return ai_log_pair(z)[1]
    # Bi(z) = e^{i pi/6} Ai(jz) + e^{-i pi/6} Ai(j^2 z)
    la1, lp1 = ai_log_pair(J * z)
    la2, lp2 = ai_log_pair(J2 * z)
    if kind is AiryKind.B:
        pair, w = np.stack([la1, la2]), [_E_PI6, _E_PI6.conjugate()]
    else:
        pair, w = np.stack([lp1, lp2]), [_E_PI6 * J, _E_PI6.conjugate() * J2]
    w = np.array(w).reshape((2,) + (1,) * z.ndim)
    return logsumexp_complex(pair, weights=w, axis=0)


def airy(z, kind="A"):
    """Value of A, A', B or B' at complex ``z`` with ``|z| <= 30``.

    Raises
    ------
    AiryRangeError
        if ``|z| > 30``; the value may overflow and ``airy_scaled`` must be
        used instead.
    """
    arr = np.asarray(z, dtype=complex)
    if np.any(np.abs(arr) > DIRECT_LIMIT):
        raise AiryRangeError(
            f"|z| = {np.max(np.abs(arr)):.4g} > {DIRECT_LIMIT}: direct Airy values may overflow, "
            "use airy_scaled() for log-scaled output")
    with np.errstate(under="ignore"):
        out = np.exp(airy_log(arr, kind))
    out = np.where(np.isnan(out), 0.0, out)
    if np.ndim(z) == 0:
        return complex(out)
    return out


def airy_scaled(z, kind="A"):
    """Log-scaled Airy value: a :class:`LogComplex` (array input gives a list)."""
    logs = airy_log(z, kind)
    if np.ndim(logs) == 0:
        return LogComplex.from_log(complex(logs))
    return [LogComplex.from_log(v) for v in np.ravel(logs)]


def connection_residual(z):
    """Largest scaled defect of the four rotation identities at ``z``.

    Checks ``A(jz) = -1/2 j^2 A(z) + 1/2 i j^2 B(z)``, ``B(jz) = 3/2 i j^2 A(z)
    - 1/2 j^2 B(z)`` and the two ``j^2`` counterparts; each defect is divided
    by the largest term of its identity.
    """
    z = complex(z)
    a, b = airy(z, "A"), airy(z, "B")
    aj, bj = airy(J * z, "A"), airy(J * z, "B")
    aj2, bj2 = airy(J2 * z, "A"), airy(J2 * z, "B")
    checks = [
        (aj, -0.5 * J2 * a, 0.5j * J2 * b),
        (bj, 1.5j * J2 * a, -0.5 * J2 * b),
        (aj2, -0.5 * J * a, -0.5j * J * b),
        (bj2, -1.5j * J * a, -0.5 * J * b),
    ]
    worst = 0.0
    for lhs, r1, r2 in checks:
        scale = max(abs(lhs), abs(r1), abs(r2), 1e-300)
        worst = max(worst, abs(lhs - r1 - r2) / scale)
    return worst


def _base_det_log(t):
    """log of det(A(jt), A(j^2 t); j A'(jt), j^2 A'(j^2 t)), cancellation free.

    When ``t`` lies in the recessive sector both columns are dominant and the
    direct 2x2 determinant cancels; there ``A(j^2 t) = -j A(t) - j^2 A(jt)``
    turns it into ``-j * W(A(j.), A(.))`` which pairs a dominant factor with
    a recessive one.
    """
    t = complex(t)
    if abs(t) > 0 and abs(cmath.phase(t)) < math.pi / 3:
        la_j, lp_j = ai_log_pair(J * t)
        la, lp = ai_log_pair(t)
        # -j * (A(jt) A'(t) - j A'(jt) A(t))
        return logsumexp_complex([la_j + lp, lp_j + la], weights=np.array([-J, J2]))
    la_j, lp_j = ai_log_pair(J * t)
    la_j2, lp_j2 = ai_log_pair(J2 * t)
    return logsumexp_complex([la_j + lp_j2, la_j2 + lp_j], weights=np.array([J2, -J]))


def base_determinant(t):
    """The constant determinant of the rotated Airy pair; equals i/(2 pi)."""
    return cmath.exp(_base_det_log(t))


@dataclass(frozen=True)
class FundamentalMatrix:
    """M(t) for the normal form, entries log-scaled.

    ``entries[0] = (A(js), A(j^2 s))`` and ``entries[1] = (eps j A'(js),
    eps j^2 A'(j^2 s))`` times ``sqrt(pi/eps)``, with ``s = (t - b)/eps^2``.
    """

    entries: tuple
    t: float
    params: object

    def value(self, row, col):
        return self.entries[row][col].to_complex()

    def column(self, col):
        return (self.entries[0][col], self.entries[1][col])

    def determinant(self):
        """det M(t), evaluated without cancellation; should be i/2."""
        eps = self.params.eps
        s = (self.t - self.params.b) / eps ** 2
        return cmath.exp(_base_det_log(s)) * math.pi


def fundamental_matrix(t, params):
    """Airy fundamental matrix of the normal form at real ``t``.

    Each column ``Y = exp(t^2 / (2 eps3)) * M[:, k]`` solves ``eps3 Y' = J(t) Y``.
    """
    eps = params.eps
    s = (t - params.b) / eps ** 2
    la_j, lp_j = ai_log_pair(J * s)
    la_j2, lp_j2 = ai_log_pair(J2 * s)
    pref = 0.5 * math.log(math.pi / eps)
    leps = math.log(eps)
    row0 = (LogComplex.from_log(pref + la_j), LogComplex.from_log(pref + la_j2))
    row1 = (LogComplex.from_log(pref + leps + lp_j + cmath.log(J)),
            LogComplex.from_log(pref + leps + lp_j2 + cmath.log(J2)))
    return FundamentalMatrix(entries=(row0, row1), t=float(t), params=params)
