# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot kernels; see ``_fallback`` for the reference code."""
import numpy as np
cimport numpy as cnp
from libc.math cimport isfinite, fabs

cnp.import_array()

cdef double AI0 = 0.355028053887817239260063186004183176397979174199
cdef double AIP0 = -0.258819403792806798405183560189203963479091138354
DEF MACLAURIN_TERMS = 130
DEF TAYLOR_TERMS = 40


def airy_maclaurin(z):
    """Ai and Ai' from the Maclaurin series of w'' = z w."""
    za = np.asarray(z, dtype=complex)
    shape = za.shape
    cdef double complex[::1] zf = np.ascontiguousarray(za).ravel()
    cdef Py_ssize_t m = zf.shape[0]
    ai_out = np.zeros(m, dtype=complex)
    aip_out = np.zeros(m, dtype=complex)
    cdef double complex[::1] ai = ai_out
    cdef double complex[::1] aip = aip_out
    cdef double a[MACLAURIN_TERMS]
    cdef int n
    a[0] = AI0
    a[1] = AIP0
    a[2] = 0.0
    for n in range(3, MACLAURIN_TERMS):
        a[n] = a[n - 3] / (n * (n - 1))
    cdef Py_ssize_t i
    cdef double complex zi, zn, znm1, s, sp
    cdef double r, rn
    for i in range(m):
        zi = zf[i]
        r = abs(zi)
        zn = 1.0
        znm1 = 0.0
        s = 0.0
        sp = 0.0
        rn = 1.0
        for n in range(MACLAURIN_TERMS):
            if a[n] != 0.0:
                s = s + a[n] * zn
                sp = sp + n * a[n] * znm1
            elif n > 3 and fabs(a[n - 1]) * rn * n < 1e-20 and fabs(a[n - 2]) * rn * n < 1e-20:
                break
            znm1 = zn
            zn = zn * zi
            rn = rn * r
        ai[i] = s
        aip[i] = sp
    return ai_out.reshape(shape), aip_out.reshape(shape)


def airy_ode_march(z0, w0, dw0, z1, int nsteps):
    """Carry (w, w') of w'' = z w from z0 to z1 in ``nsteps`` Taylor steps."""
    b0, bw, bdw, b1 = np.broadcast_arrays(
        np.asarray(z0, dtype=complex), np.asarray(w0, dtype=complex),
        np.asarray(dw0, dtype=complex), np.asarray(z1, dtype=complex))
    shape = b0.shape
    cdef double complex[::1] za = np.ascontiguousarray(b0).ravel()
    cdef double complex[::1] wa = np.ascontiguousarray(bw).ravel()
    cdef double complex[::1] dwa = np.ascontiguousarray(bdw).ravel()
    cdef double complex[::1] zb = np.ascontiguousarray(b1).ravel()
    cdef Py_ssize_t m = za.shape[0]
    w_out = np.empty(m, dtype=complex)
    dw_out = np.empty(m, dtype=complex)
    cdef double complex[::1] wo = w_out
    cdef double complex[::1] dwo = dw_out
    cdef Py_ssize_t i
    cdef int k, n
    cdef double complex h, zc, w, dw, acur, wn, dwn, hp, prev2, prev1, aprev3, an
    cdef double inv_nn[TAYLOR_TERMS]
    for n in range(3, TAYLOR_TERMS):
        inv_nn[n] = 1.0 / (n * (n - 1))
    for i in range(m):
        h = (zb[i] - za[i]) / nsteps
        zc = za[i]
        w = wa[i]
        dw = dwa[i]
        for k in range(nsteps):
            acur = zc * w * 0.5
            wn = w + dw * h + acur * h * h
            dwn = dw + 2.0 * acur * h
            hp = h * h
            prev2 = dw
            prev1 = acur
            aprev3 = w
            for n in range(3, TAYLOR_TERMS):
                an = (zc * prev2 + aprev3) * inv_nn[n]
                dwn = dwn + n * an * hp
                hp = hp * h
                wn = wn + an * hp
                aprev3 = prev2
                prev2 = prev1
                prev1 = an
            w = wn
            dw = dwn
            zc = zc + h
        wo[i] = w
        dwo[i] = dw
    return w_out.reshape(shape), dw_out.reshape(shape)


def rk4_linear(double t0, double x0, double y0, double h, Py_ssize_t nsteps,
               double eps3, double b, double c1, double c2):
    """Fixed-step RK4 for eps3 X' = J(t) X + eps3 c with J = [[t, 1], [t-b, t]]."""
    ts_out = np.empty(nsteps + 1)
    xs_out = np.empty(nsteps + 1)
    ys_out = np.empty(nsteps + 1)
    cdef double[::1] ts = ts_out
    cdef double[::1] xs = xs_out
    cdef double[::1] ys = ys_out
    cdef double inv = 1.0 / eps3
    cdef double t = t0, x = x0, y = y0, h2 = 0.5 * h, tm, t1
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y, xa, ya
    cdef Py_ssize_t i
    ts[0] = t
    xs[0] = x
    ys[0] = y
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
        if not (isfinite(x) and isfinite(y)) or fabs(x) > 1e300 or fabs(y) > 1e300:
            return ts_out, xs_out, ys_out, i
        ts[i] = t
        xs[i] = x
        ys[i] = y
    return ts_out, xs_out, ys_out, nsteps + 1
