# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, log, sqrt, cos, sin, INFINITY, M_PI

cnp.import_array()

cdef double EULER_GAMMA = 0.57721566490153286060651209
cdef double X_SWITCH = 12.0


def poly_shift(coeffs, double center, double sign=1.0):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = np.array(coeffs, dtype=np.float64)
    cdef double[::1] c = arr
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t i, j
    cdef double s = 1.0
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += center * c[j + 1]
    for j in range(n):
        c[j] *= s
        s *= sign
    return arr


def series_coefficients(a2_in, a1_in, a0_in, double rho, double c0, double c1,
                        Py_ssize_t nterms):
    cdef double[::1] a2 = np.ascontiguousarray(a2_in, dtype=np.float64)
    cdef double[::1] a1 = np.ascontiguousarray(a1_in, dtype=np.float64)
    cdef double[::1] a0 = np.ascontiguousarray(a0_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(nterms, dtype=np.float64)
    cdef double[::1] c = out
    cdef Py_ssize_t n2 = a2.shape[0], n1 = a1.shape[0], n0 = a0.shape[0]
    cdef Py_ssize_t m, j, k, n
    cdef double acc, lead1, denom
    with nogil:
        c[0] = c0
        if a2[0] != 0.0:
            if nterms > 1:
                c[1] = c1
            for m in range(2, nterms):
                acc = 0.0
                for j in range(1, min(n2, m + 1)):
                    k = m - j
                    acc += a2[j] * k * (k - 1) * c[k]
                for j in range(0, min(n1, m)):
                    k = m - 1 - j
                    acc += a1[j] * k * c[k]
                for j in range(0, min(n0, m - 1)):
                    acc += a0[j] * c[m - 2 - j]
                c[m] = -acc / (a2[0] * m * (m - 1))
        else:
            lead1 = a2[1] if n2 > 1 else 0.0
            for n in range(1, nterms):
                acc = 0.0
                for j in range(2, min(n2, n + 2)):
                    k = n + 1 - j
                    acc += a2[j] * (k + rho) * (k + rho - 1.0) * c[k]
                for j in range(1, min(n1, n + 1)):
                    k = n - j
                    acc += a1[j] * (k + rho) * c[k]
                for j in range(0, min(n0, n)):
                    acc += a0[j] * c[n - 1 - j]
                denom = (n + rho) * (lead1 * (n + rho - 1.0) + a1[0])
                c[n] = -acc / denom
    return out


def series_eval(c_in, double rho, double t):
    cdef double[::1] c = np.ascontiguousarray(c_in, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t k
    cdef double u = 0.0, du = 0.0, scale = 0.0, tn = 1.0, term, tail, p
    cdef double l0 = 0.0, l1 = 0.0, l2 = 0.0
    for k in range(n):
        term = c[k] * tn
        u += term
        scale += fabs(term)
        if t != 0.0:
            du += (k + rho) * term / t
        elif k == 1:
            du += c[1]
        if k % 3 == 0:
            l0 = fabs(term)
        elif k % 3 == 1:
            l1 = fabs(term)
        else:
            l2 = fabs(term)
        tn *= t
    tail = max(l0, max(l1, l2)) / scale if scale > 0.0 else 0.0
    if rho != 0.0:
        p = t ** rho
        u *= p
        du *= p
    return u, du, tail


cdef void _small_series(double x, double* j0, double* j1, double* s0, double* s1) noexcept nogil:
    cdef double q = 0.25 * x * x
    cdef double t0 = 1.0, t1 = 1.0, harm = 0.0, psi1, psi2
    cdef int k = 0
    j0[0] = 0.0
    j1[0] = 0.0
    s0[0] = 0.0
    s1[0] = 0.0
    while True:
        psi1 = harm - EULER_GAMMA
        psi2 = harm + 1.0 / (k + 1) - EULER_GAMMA
        j0[0] += t0
        j1[0] += t1
        s0[0] += 2.0 * psi1 * t0
        s1[0] += (psi1 + psi2) * t1
        if k > 3 and fabs(t0) < 1e-18 and fabs(t1) < 1e-18:
            break
        k += 1
        harm += 1.0 / k
        t0 *= -q / (k * k)
        t1 *= -q / (k * (k + 1))
    j1[0] *= 0.5 * x


cdef void _hankel_pq(double order, double x, double* p, double* q) noexcept nogil:
    cdef double mu = 4.0 * order * order
    cdef double term = 1.0, prev = INFINITY, sgn
    cdef int k = 0
    p[0] = 0.0
    q[0] = 0.0
    while fabs(term) < prev:
        sgn = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p[0] += sgn * term
        else:
            q[0] += sgn * term
        prev = fabs(term)
        if prev < 1e-17:
            break
        k += 1
        term *= (mu - (2 * k - 1) * (2 * k - 1)) / (k * 8.0 * x)


cdef void _bessel01(double x, double* out) noexcept nogil:
    cdef double j0, j1, s0, s1, lg, amp, p0, q0, p1, q1, c0, c1
    cdef double two_pi = 2.0 / M_PI
    if x < X_SWITCH:
        _small_series(x, &j0, &j1, &s0, &s1)
        out[0] = j0
        out[1] = j1
        if x == 0.0:
            out[2] = -INFINITY
            out[3] = -INFINITY
            return
        lg = log(0.5 * x)
        out[2] = two_pi * lg * j0 - s0 / M_PI
        out[3] = two_pi * lg * j1 - two_pi / x - 0.5 * x * s1 / M_PI
        return
    amp = sqrt(two_pi / x)
    _hankel_pq(0.0, x, &p0, &q0)
    _hankel_pq(1.0, x, &p1, &q1)
    c0 = x - 0.25 * M_PI
    c1 = x - 0.75 * M_PI
    out[0] = amp * (p0 * cos(c0) - q0 * sin(c0))
    out[1] = amp * (p1 * cos(c1) - q1 * sin(c1))
    out[2] = amp * (p0 * sin(c0) + q0 * cos(c0))
    out[3] = amp * (p1 * sin(c1) + q1 * cos(c1))


def bessel01(double x):
    cdef double out[4]
    _bessel01(x, out)
    return out[0], out[1], out[2], out[3]


def bessel01_array(x):
    xa = np.asarray(x, dtype=np.float64)
    cdef double[::1] flat = np.ascontiguousarray(xa.ravel())
    cdef Py_ssize_t n = flat.shape[0], i
    res = np.empty((4, n), dtype=np.float64)
    cdef double[:, ::1] r = res
    cdef double buf[4]
    with nogil:
        for i in range(n):
            _bessel01(flat[i], buf)
            r[0, i] = buf[0]
            r[1, i] = buf[1]
            r[2, i] = buf[2]
            r[3, i] = buf[3]
    return res.reshape((4,) + xa.shape)
