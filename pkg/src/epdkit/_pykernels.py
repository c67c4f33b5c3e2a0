"""Numpy implementation of the Bessel kernels.

This is the fallback backend; ``_kernels.pyx`` implements the same
algorithms point by point in C. Both expose

    jv(nu, t)     J_nu(t) for t >= 0, nu > -1
    normj(nu, t)  2**nu Gamma(nu+1) J_nu(t) / t**nu, any real t

on 1-D float64 arrays. Regimes: power series for t <= SERIES_MAX, Miller
backward recurrence for the middle range, Hankel asymptotic expansion for
t >= asymptotic_threshold(nu).
"""
import math

import numpy as np

SERIES_MAX = 0.5
SERIES_TERMS = 48
ASYM_TERMS = 40

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def lanczos_gamma(z):
    """Gamma for real z away from the poles (Lanczos g=7 with reflection)."""
    if z < 0.5:
        r = z - 2.0 * round(z / 2.0)
        return math.pi / (math.sin(math.pi * r) * lanczos_gamma(1.0 - z))
    z -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


def asymptotic_threshold(nu):
    return max(30.0, 1.5 * nu * nu + 12.0)


def _series_sum(nu, t):
    # sum_k (-t^2/4)^k / (k! (nu+1)_k)
    z = 0.25 * t * t
    term = np.ones_like(t)
    total = np.ones_like(t)
    for k in range(1, SERIES_TERMS):
        term = term * (-z) / (k * (nu + k))
        total = total + term
    return total


def _asymptotic(nu, t):
    """Hankel expansion; returns (P, Q, chi) with J = sqrt(2/(pi t)) (P cos chi - Q sin chi)."""
    mu = 4.0 * nu * nu
    p = np.ones_like(t)
    q = np.zeros_like(t)
    a = np.ones_like(t)
    last = np.full_like(t, np.inf)
    active = np.ones(t.shape, dtype=bool)
    for k in range(1, ASYM_TERMS):
        a = a * (mu - (2 * k - 1) ** 2) / (8.0 * k * t)
        mag = np.abs(a)
        # stop once terms start growing or fall below resolution
        active &= (mag < last) & (mag > 1e-18)
        last = np.where(active, mag, last)
        contrib = np.where(active, a, 0.0)
        if k % 2 == 1:
            q = q + (1.0 if (k // 2) % 2 == 0 else -1.0) * contrib
        else:
            p = p + (1.0 if (k // 2) % 2 == 0 else -1.0) * contrib
        if not active.any():
            break
    chi = t - (0.5 * nu + 0.25) * math.pi
    return p, q, chi


def _miller(nu, t):
    """J_nu(t) by backward recurrence normalised with
    (t/2)**mu = sum_k (mu+2k) Gamma(mu+k)/k! J_{mu+2k}(t), mu = frac(nu)."""
    n_target = math.floor(nu)
    mu = nu - n_target
    top = int(1.25 * float(t.max())) + 40 + max(n_target, 0)
    if top % 2:
        top += 1
    f_next = np.zeros_like(t)
    f_cur = np.full_like(t, 1e-30)
    norm = np.zeros_like(t)
    captured = np.zeros_like(t)
    gmu1 = lanczos_gamma(mu + 1.0)
    # coefficient of J_{mu+2k}: k=0 -> Gamma(mu+1); k>=1 -> (mu+2k) g_k, g_k = Gamma(mu+k)/k!
    g = [gmu1]
    for k in range(1, top // 2 + 1):
        g.append(g[-1] * (mu + k - 1) / k if k > 1 else gmu1)
    j = top
    while True:
        if j == n_target:
            captured = f_cur.copy()
        if j >= 0 and j % 2 == 0:
            kk = j // 2
            coef = gmu1 if kk == 0 else (mu + j) * g[kk]
            norm = norm + coef * f_cur
        if j <= min(n_target, 0):
            break
        f_prev = (2.0 * (mu + j) / t) * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        j -= 1
        big = np.abs(f_cur) > 1e250
        if big.any():
            s = np.where(big, 1e-250, 1.0)
            f_cur, f_next, norm, captured = f_cur * s, f_next * s, norm * s, captured * s
    return captured * (0.5 * t) ** mu / norm


def jv(nu, t):
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    small = t <= SERIES_MAX
    big = t >= asymptotic_threshold(nu)
    mid = ~(small | big)
    if small.any():
        ts = t[small]
        with np.errstate(divide="ignore"):
            pref = np.power(0.5 * ts, nu) / lanczos_gamma(nu + 1.0)
        vals = pref * _series_sum(nu, ts)
        if nu == 0.0:
            vals = np.where(ts == 0.0, 1.0, vals)
        out[small] = vals
    if mid.any():
        out[mid] = _miller(nu, t[mid])
    if big.any():
        tb = t[big]
        p, q, chi = _asymptotic(nu, tb)
        out[big] = np.sqrt(2.0 / (math.pi * tb)) * (p * np.cos(chi) - q * np.sin(chi))
    return out


def normj(nu, t):
    t = np.abs(np.asarray(t, dtype=np.float64))
    out = np.empty_like(t)
    small = t <= SERIES_MAX
    if small.any():
        out[small] = _series_sum(nu, t[small])
    if (~small).any():
        tl = t[~small]
        out[~small] = (2.0 ** nu * lanczos_gamma(nu + 1.0)) * jv(nu, tl) / np.power(tl, nu)
    return out
