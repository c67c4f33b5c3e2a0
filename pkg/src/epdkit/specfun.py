"""Scalar special functions: Gamma, Bessel J and Y, normalized Bessel j, 0F1.

All functions accept a float or an array and return the same kind. The hot
Bessel evaluations go through ``epdkit._backend.kernels`` (compiled when
available).
"""
import math

import numpy as np

from ._backend import kernels
from ._pykernels import _asymptotic, asymptotic_threshold, lanczos_gamma
from .errors import DomainError

__all__ = ["gamma", "bessel_j", "bessel_y", "normalized_j", "hyp0f1"]


def _is_nonpositive_integer(z):
    return z <= 0 and z == math.floor(z)


def _wrap(values, scalar):
    return float(values.reshape(-1)[0]) if scalar else values


def gamma(z):
    """Gamma function of a real argument.

    Lanczos approximation with the reflection formula below 1/2; positive
    integers up to 171 return the exact factorial.
    """
    z = float(z)
    if _is_nonpositive_integer(z):
        raise DomainError(f"gamma has a pole at z={z:g}")
    if z == math.floor(z) and 0 < z <= 171:
        return float(math.factorial(int(z) - 1))
    return lanczos_gamma(z)


def bessel_j(nu, t):
    """Bessel function of the first kind J_nu(t) for nu > -1 and t >= 0."""
    nu = float(nu)
    if nu <= -1.0:
        raise DomainError(f"bessel_j requires nu > -1, got {nu:g}")
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise DomainError("bessel_j requires t >= 0")
    return _wrap(np.asarray(kernels.jv(nu, t)), scalar)


def normalized_j(nu, t):
    """Normalized Bessel function j_nu(t) = 2**nu Gamma(nu+1) J_nu(t) / t**nu.

    Even in t with j_nu(0) = 1. Near the origin it is summed as a power
    series in t**2, so there is no 0/0 at t = 0.
    """
    nu = float(nu)
    if nu <= -1.0:
        raise DomainError(f"normalized_j requires nu > -1, got {nu:g}")
    scalar = np.ndim(t) == 0
    t = np.abs(np.asarray(t, dtype=np.float64))
    return _wrap(np.asarray(kernels.normj(nu, t)), scalar)


def _y_integral(nu, x):
    # Y_nu(x) = 1/pi int_0^pi sin(x sin th - nu th) dth
    #           - 1/pi int_0^inf (e^{nu s} + e^{-nu s} cos(nu pi)) e^{-x sinh s} ds
    n1 = 48 + int(2 * x)
    u, w = np.polynomial.legendre.leggauss(n1)
    th = 0.5 * math.pi * (u + 1.0)
    first = 0.5 * math.pi * np.dot(w, np.sin(x * np.sin(th) - nu * th))

    anu = abs(nu)
    s_peak = math.acosh(anu / x) if anu > x else 0.0
    peak = anu * s_peak - x * math.sinh(s_peak)
    upper = max(1.0, 2.0 * s_peak)
    while x * math.sinh(upper) - anu * upper < peak + 42.0:
        upper *= 1.25
    panels = max(8, int(math.ceil(upper / 0.25)))
    u2, w2 = np.polynomial.legendre.leggauss(20)
    edges = np.linspace(0.0, upper, panels + 1)
    half = 0.5 * np.diff(edges)
    s = (edges[:-1, None] + half[:, None] * (u2[None, :] + 1.0)).ravel()
    ws = (half[:, None] * w2[None, :]).ravel()
    integrand = (np.exp(nu * s - x * np.sinh(s))
                 + math.cos(nu * math.pi) * np.exp(-nu * s - x * np.sinh(s)))
    second = np.dot(ws, integrand)
    return (first - second) / math.pi


def bessel_y(nu, t):
    """Bessel function of the second kind Y_nu(t), t > 0.

    Hankel asymptotic expansion for large t, Schlaefli's integral otherwise;
    the integral form holds for every real order, integer orders included.
    """
    nu = float(nu)
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0):
        raise DomainError("bessel_y is singular at t = 0; requires t > 0")
    flat = t.reshape(-1)
    out = np.empty_like(flat)
    big = flat >= asymptotic_threshold(nu)
    if big.any():
        p, q, chi = _asymptotic(nu, flat[big])
        out[big] = np.sqrt(2.0 / (math.pi * flat[big])) * (p * np.sin(chi) + q * np.cos(chi))
    for i in np.flatnonzero(~big):
        out[i] = _y_integral(nu, float(flat[i]))
    return _wrap(out.reshape(t.shape), scalar)


def _hyp0f1_series(b, z):
    term = np.ones_like(z)
    total = np.ones_like(z)
    k = 0
    done = np.zeros(z.shape, dtype=bool)
    while not done.all():
        k += 1
        term = term * z / (k * (b + k - 1))
        total = total + term
        # past the peak term and below resolution
        done |= (k * k > np.abs(z)) & (np.abs(term) <= 1e-17 * np.abs(total))
        if k > 2000:
            break
    return total


def hyp0f1(b, z):
    """Confluent limit function 0F1(;b;z).

    Positive z: power series with adaptive truncation. Negative z with
    b > 0: through j_{b-1}(2 sqrt(-z)). Negative z with b < 0: series for
    |z| <= 16, otherwise the contiguous relation
    F(b-1) = F(b) + z F(b+1) / (b (b-1)) run downward from positive b,
    which is the stable direction for this family.
    """
    b = float(b)
    if _is_nonpositive_integer(b):
        raise DomainError(f"hyp0f1 has a pole at b={b:g}")
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=np.float64)
    flat = z.reshape(-1)
    out = np.empty_like(flat)
    pos = flat >= 0
    if pos.any():
        out[pos] = _hyp0f1_series(b, flat[pos])
    neg = ~pos
    if neg.any():
        zn = flat[neg]
        if b > 0:
            out[neg] = kernels.normj(b - 1.0, 2.0 * np.sqrt(-zn))
        else:
            vals = np.empty_like(zn)
            near = zn >= -16.0
            if near.any():
                vals[near] = _hyp0f1_series(b, zn[near])
            far = ~near
            if far.any():
                zf = zn[far]
                tf = 2.0 * np.sqrt(-zf)
                n = int(math.ceil(-b)) + 1
                top = b + n
                f_hi = kernels.normj(top, tf)             # F(top + 1)
                f_cur = kernels.normj(top - 1.0, tf)      # F(top)
                bb = top
                while bb > b + 0.5:
                    f_lo = f_cur + zf * f_hi / (bb * (bb - 1.0))
                    f_hi, f_cur = f_cur, f_lo
                    bb -= 1.0
                vals[far] = f_cur
            out[neg] = vals
    return _wrap(out.reshape(z.shape), scalar)
