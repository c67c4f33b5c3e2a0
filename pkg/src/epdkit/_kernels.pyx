# cython: language_level=3
"""Compiled Bessel kernels.

Point-by-point C versions of the algorithms in ``_pykernels``: power series
for t <= 8, Miller backward recurrence for the middle range, Hankel
asymptotic expansion above ``asymptotic_threshold(nu)``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, exp, sin, cos, floor, fabs, M_PI, INFINITY, round

cnp.import_array()

cdef enum:
    SERIES_TERMS = 48
    ASYM_TERMS = 40
    MAX_HALF = 4096

cdef double SERIES_MAX = 0.5

cdef double[9] _LZ
_LZ[:] = [0.99999999999980993, 676.5203681218851, -1259.1392167224028,
          771.32342877765313, -176.61502916214059, 12.507343278686905,
          -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7]


cdef double _gamma(double z) noexcept nogil:
    cdef double r, acc, t
    cdef int i
    if z < 0.5:
        r = z - 2.0 * round(z / 2.0)
        return M_PI / (sin(M_PI * r) * _gamma(1.0 - z))
    z -= 1.0
    acc = _LZ[0]
    for i in range(1, 9):
        acc += _LZ[i] / (z + i)
    t = z + 7.5
    return sqrt(2.0 * M_PI) * pow(t, z + 0.5) * exp(-t) * acc


cdef inline double _asym_threshold(double nu) noexcept nogil:
    cdef double v = 1.5 * nu * nu + 12.0
    return v if v > 30.0 else 30.0


cdef double _series_sum(double nu, double t) noexcept nogil:
    cdef double z = 0.25 * t * t
    cdef double term = 1.0, total = 1.0
    cdef int k
    for k in range(1, SERIES_TERMS):
        term = term * (-z) / (k * (nu + k))
        total += term
        if fabs(term) < 1e-17 * fabs(total) and k > 2:
            break
    return total


cdef double _asymptotic(double nu, double t) noexcept nogil:
    cdef double mu = 4.0 * nu * nu
    cdef double p = 1.0, q = 0.0, a = 1.0, last = INFINITY, mag, sgn, chi
    cdef int k
    for k in range(1, ASYM_TERMS):
        a = a * (mu - (2 * k - 1) * (2 * k - 1)) / (8.0 * k * t)
        mag = fabs(a)
        if not (mag < last and mag > 1e-18):
            break
        last = mag
        sgn = 1.0 if (k // 2) % 2 == 0 else -1.0
        if k % 2 == 1:
            q += sgn * a
        else:
            p += sgn * a
    chi = t - (0.5 * nu + 0.25) * M_PI
    return sqrt(2.0 / (M_PI * t)) * (p * cos(chi) - q * sin(chi))


cdef double _miller(double nu, double t, double* g, int gsize) noexcept nogil:
    # g[k] = Gamma(mu+k)/k! for k >= 1, g[0] = Gamma(mu+1)
    cdef int n_target = <int>floor(nu)
    cdef double mu = nu - n_target
    cdef int top = <int>(1.25 * t) + 40 + (n_target if n_target > 0 else 0)
    cdef double f_next = 0.0, f_cur = 1e-30, f_prev, norm = 0.0, captured = 0.0, coef
    cdef int j, kk, stop
    if top % 2:
        top += 1
    if top // 2 >= gsize:
        top = 2 * (gsize - 1)
    stop = n_target if n_target < 0 else 0
    j = top
    while True:
        if j == n_target:
            captured = f_cur
        if j >= 0 and j % 2 == 0:
            kk = j // 2
            coef = g[0] if kk == 0 else (mu + j) * g[kk]
            norm += coef * f_cur
        if j <= stop:
            break
        f_prev = (2.0 * (mu + j) / t) * f_cur - f_next
        f_next = f_cur
        f_cur = f_prev
        j -= 1
        if fabs(f_cur) > 1e250:
            f_cur *= 1e-250
            f_next *= 1e-250
            norm *= 1e-250
            captured *= 1e-250
    return captured * pow(0.5 * t, mu) / norm


cdef void _fill_g(double mu, double* g, int gsize) noexcept nogil:
    cdef int k
    g[0] = _gamma(mu + 1.0)
    if gsize > 1:
        g[1] = g[0]
    for k in range(2, gsize):
        g[k] = g[k - 1] * (mu + k - 1) / k


def gamma(double z):
    return _gamma(z)


def asymptotic_threshold(double nu):
    return _asym_threshold(nu)


def jv(double nu, t):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tt = np.ascontiguousarray(t, dtype=np.float64).ravel()
    cdef Py_ssize_t n = tt.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double x, thr = _asym_threshold(nu), g_nu1 = _gamma(nu + 1.0)
    cdef double mu = nu - floor(nu)
    cdef double[MAX_HALF] g
    _fill_g(mu, g, MAX_HALF)
    with nogil:
        for i in range(n):
            x = tt[i]
            if x <= SERIES_MAX:
                if x == 0.0:
                    out[i] = 1.0 if nu == 0.0 else (0.0 if nu > 0.0 else INFINITY)
                else:
                    out[i] = pow(0.5 * x, nu) / g_nu1 * _series_sum(nu, x)
            elif x >= thr:
                out[i] = _asymptotic(nu, x)
            else:
                out[i] = _miller(nu, x, g, MAX_HALF)
    return out.reshape(np.shape(t))


def normj(double nu, t):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tt = np.ascontiguousarray(t, dtype=np.float64).ravel()
    cdef Py_ssize_t n = tt.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double x, thr = _asym_threshold(nu), g_nu1 = _gamma(nu + 1.0)
    cdef double pref = pow(2.0, nu) * g_nu1, jval
    cdef double mu = nu - floor(nu)
    cdef double[MAX_HALF] g
    _fill_g(mu, g, MAX_HALF)
    with nogil:
        for i in range(n):
            x = fabs(tt[i])
            if x <= SERIES_MAX:
                out[i] = _series_sum(nu, x)
            else:
                if x >= thr:
                    jval = _asymptotic(nu, x)
                else:
                    jval = _miller(nu, x, g, MAX_HALF)
                out[i] = pref * jval / pow(x, nu)
    return out.reshape(np.shape(t))
