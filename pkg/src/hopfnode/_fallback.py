"""Pure-Python/numpy versions of the hot kernels.

These are used when the compiled ``_kernels`` extension is not available.
Signatures and results match the Cython module exactly (up to rounding).
"""
import math

import numpy as np

AI0 = 0.355028053887817239260063186004183176397979174199
AIP0 = -0.258819403792806798405183560189203963479091138354

MACLAURIN_TERMS = 130
TAYLOR_TERMS = 40


def airy_maclaurin(z):
    """Ai and Ai' from the Maclaurin series of w'' = z w.

    Parameters
    ----------
    z : array_like of complex

    Returns
    -------
    ai, aip : ndarray of complex
    """
    z = np.asarray(z, dtype=complex)
    r = float(np.max(np.abs(z))) if z.size else 0.0
    ai = np.zeros_like(z)
    aip = np.zeros_like(z)
    zn = np.ones_like(z)      # z**n
    znm1 = np.zeros_like(z)   # z**(n-1)
    # a[n+2] = a[n-1] / ((n+2)(n+1)), a0 = Ai(0), a1 = Ai'(0), a2 = 0
    a = [AI0, AIP0, 0.0]
    rn = 1.0
    for n in range(MACLAURIN_TERMS):
        if n >= 3:
            a.append(a[n - 3] / (n * (n - 1)))
        an = a[n]
        if an != 0.0:
            ai = ai + an * zn
            aip = aip + n * an * znm1
        elif n > 3 and abs(a[n - 1]) * rn * n < 1e-20 and abs(a[n - 2]) * rn * n < 1e-20:
            break
        znm1 = zn
        zn = zn * z
        rn *= r
    return ai, aip


def airy_ode_march(z0, w0, dw0, z1, nsteps):
    """Carry (w, w') of w'' = z w from z0 to z1 in ``nsteps`` Taylor steps.

    All array arguments broadcast together; every element takes the same
    number of equal steps along its own straight segment.
    """
    z0 = np.asarray(z0, dtype=complex)
    z1 = np.asarray(z1, dtype=complex)
    w = np.asarray(w0, dtype=complex).copy()
    dw = np.asarray(dw0, dtype=complex).copy()
    h = (z1 - z0) / nsteps
    zc = z0.copy()
    for _ in range(nsteps):
        am2 = w            # a[n-1] in the recurrence
        am1 = dw
        acur = zc * w / 2.0
        wn = w + dw * h + acur * h * h
        dwn = dw + 2.0 * acur * h
        hp = h * h         # h**(n-1) for n = 3
        prev2, prev1 = am1, acur  # a[1], a[2]
        aprev3 = am2              # a[0]
        for n in range(3, TAYLOR_TERMS):
            # a[n] = (zc a[n-2] + a[n-3]) / (n (n-1))
            an = (zc * prev2 + aprev3) / (n * (n - 1))
            dwn = dwn + n * an * hp
            hp = hp * h
            wn = wn + an * hp
            aprev3, prev2, prev1 = prev2, prev1, an
        w, dw = wn, dwn
        zc = zc + h
    return w, dw


def rk4_linear(t0, x0, y0, h, nsteps, eps3, b, c1, c2):
    """Fixed-step RK4 for eps3 X' = J(t) X + eps3 c with J = [[t, 1], [t-b, t]].

    ``h`` may be negative (backward integration). Returns ``(t, x, y, nvalid)``
    arrays of length ``nsteps + 1``; integration stops early once |X| exceeds
    1e300 or turns non-finite, and ``nvalid`` counts the samples written.
    """
    ts = np.empty(nsteps + 1)
    xs = np.empty(nsteps + 1)
    ys = np.empty(nsteps + 1)
    inv = 1.0 / eps3
    t = t0
    x = x0
    y = y0
    ts[0] = t
    xs[0] = x
    ys[0] = y
    h2 = 0.5 * h
    for i in range(1, nsteps + 1):
        tm = t + h2
        t1 = t0 + i * h
        k1x = (t * x + y) * inv + c1
        k1y = ((t - b) * x + t * y) * inv + c2
        xa = x + h2 * k1x
        ya = y + h2 * k1y
        k2x = (tm * xa + ya) * inv + c1
        k2y = ((tm - b) * xa + tm * ya) * inv + c2
        xa = x + h2 * k2x
        ya = y + h2 * k2y
        k3x = (tm * xa + ya) * inv + c1
        k3y = ((tm - b) * xa + tm * ya) * inv + c2
        xa = x + h * k3x
        ya = y + h * k3y
        k4x = (t1 * xa + ya) * inv + c1
        k4y = ((t1 - b) * xa + t1 * ya) * inv + c2
        x = x + h * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        y = y + h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        t = t1
        if not (math.isfinite(x) and math.isfinite(y)) or abs(x) > 1e300 or abs(y) > 1e300:
            return ts, xs, ys, i
        ts[i] = t
        xs[i] = x
        ys[i] = y
    return ts, xs, ys, nsteps + 1
