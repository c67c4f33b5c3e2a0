"""One-dimensional Hankel transform route.

The transform pair at order nu = (gamma-1)/2 is

    F f(xi) = int_0^inf f(x) j_nu(x xi) x^gamma dx
    f(x)    = 1 / (4^nu Gamma(nu+1)^2) int_0^inf F f(xi) j_nu(x xi) xi^gamma dxi

and is discretised by the quasi-discrete scheme on the zeros
a_1 < ... < a_{M+1} of J_nu: samples x_i = a_i R / a_{M+1}, frequencies
xi_m = a_m / R. The spectral solution multiplies F f by a Green multiplier
solving G'' + (k/t) G' + xi^2 G = 0, G(xi, 0) = 1.
"""
from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .errors import DomainError, NumericalError, TruncationWarning, UsageError
from .specfun import bessel_j, bessel_y, gamma, hyp0f1, normalized_j

DECAY_LIMIT = 1e-6
ZERO_TOL = 1e-12


def bessel_zeros(nu, count):
    """First ``count`` positive zeros of J_nu, nu >= -1/2.

    Sign changes of J_nu are bracketed on a grid finer than the zero spacing,
    then each root is refined by Newton steps safeguarded by bisection until
    |J_nu| <= 1e-12.
    """
    nu = float(nu)
    if nu < -0.5:
        raise DomainError(f"bessel_zeros requires nu >= -1/2, got {nu:g}")
    count = int(count)
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    # McMahon: a_s ~ (s + nu/2 - 1/4) pi
    upper = (count + 0.5 * nu + 1.0) * math.pi + 10.0
    grid = np.arange(0.05, upper, 0.2)
    vals = bessel_j(nu, grid)
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    exact = np.flatnonzero(vals == 0.0)
    if idx.size + exact.size < count:
        raise NumericalError(f"found only {idx.size} sign changes of J_{nu:g} below {upper:g}",
                             index=idx.size)
    zeros = []
    for s, i in enumerate(idx[:count]):
        zeros.append(_refine_zero(nu, grid[i], grid[i + 1], s))
    out = np.array(zeros)
    if np.any(np.diff(out) <= 0):
        raise NumericalError(f"zeros of J_{nu:g} are not strictly increasing",
                             index=int(np.flatnonzero(np.diff(out) <= 0)[0]) + 1)
    return out


def _refine_zero(nu, lo, hi, index):
    f_lo = bessel_j(nu, lo)
    z = 0.5 * (lo + hi)
    for _ in range(100):
        fz = bessel_j(nu, z)
        if abs(fz) <= ZERO_TOL and hi - lo < 1e-6:
            return z
        if fz == 0.0:
            return z
        if (fz > 0) == (f_lo > 0):
            lo, f_lo = z, fz
        else:
            hi = z
        deriv = nu / z * fz - bessel_j(nu + 1.0, z)
        step = z - fz / deriv if deriv != 0 else 0.5 * (lo + hi)
        z = step if lo < step < hi else 0.5 * (lo + hi)
        if abs(bessel_j(nu, z)) <= ZERO_TOL:
            return z
    raise NumericalError(f"Newton iteration for zero {index} of J_{nu:g} did not converge",
                         index=index)


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Zero-based sampling for order nu = (gamma-1)/2 on [0, radius].

    ``forward_weights`` turn samples into the transform at any xi up to the
    bandwidth; ``inverse_weights`` turn transform values at the frequencies
    back into f(x).
    """

    gamma: float
    radius: float
    modes: int
    zeros: np.ndarray
    samples: np.ndarray
    frequencies: np.ndarray
    forward_weights: np.ndarray
    inverse_weights: np.ndarray

    @property
    def order(self):
        return 0.5 * (self.gamma - 1.0)

    @property
    def bandwidth(self):
        return self.zeros[-1] / self.radius

    @classmethod
    def build(cls, g, modes=256, radius=16.0):
        g, radius, modes = float(g), float(radius), int(modes)
        if g <= 0:
            raise DomainError(f"gamma must be positive, got {g:g}")
        if modes < 8:
            raise DomainError(f"spectral grid needs at least 8 modes, got {modes}")
        if radius <= 0:
            raise DomainError(f"radius must be positive, got {radius:g}")
        nu = 0.5 * (g - 1.0)
        zeros = bessel_zeros(nu, modes + 1)
        a = zeros[:-1]
        s = zeros[-1]
        band = s / radius
        x = a * radius / s
        xi = a / radius
        jn1 = bessel_j(nu + 1.0, a) ** 2
        fw = 2.0 * x ** (2.0 * nu) / (band * band * jn1)
        inv_const = 1.0 / (4.0 ** nu * gamma(nu + 1.0) ** 2)
        iw = 2.0 * xi ** (2.0 * nu) * inv_const / (radius * radius * jn1)
        return cls(g, radius, modes, _frozen(zeros), _frozen(x), _frozen(xi),
                   _frozen(fw), _frozen(iw))

    def same_as(self, other):
        return (self is other) or (
            self.gamma == other.gamma and self.radius == other.radius
            and self.modes == other.modes)


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    """Transform values at the grid frequencies, with diagnostics."""

    grid: SpectralGrid
    values: np.ndarray
    metadata: dict = field(default_factory=dict)


def _eval_datum(f, x):
    vals = f(np.asarray(x, dtype=np.float64)[:, None]) if _wants_points(f) else f(x)
    return np.asarray(vals, dtype=np.float64).reshape(-1)


def _wants_points(f):
    return getattr(f, "dim", None) == 1 and hasattr(f, "points")


def decay_check(f, grid):
    """Message if |f(R)| exceeds the decay limit, else None."""
    edge = abs(float(_eval_datum(f, np.array([grid.radius]))[0]))
    if edge > DECAY_LIMIT:
        return (f"datum is {edge:.3g} at the truncation radius R={grid.radius:g} "
                f"(limit {DECAY_LIMIT:g}); transform is truncated")
    return None


def transform_samples(samples, grid, xi):
    """Forward transform from samples f(x_i) at arbitrary xi <= bandwidth."""
    xi = np.asarray(xi, dtype=np.float64)
    kernel = normalized_j(grid.order, np.multiply.outer(xi.reshape(-1), grid.samples))
    return (kernel @ (grid.forward_weights * samples)).reshape(xi.shape)


def hankel_forward(f, grid):
    """Transform of an even datum at the grid frequencies.

    If the datum has not decayed at the radius the result carries a
    ``truncation`` entry in its metadata.
    """
    samples = _eval_datum(f, grid.samples)
    values = transform_samples(samples, grid, grid.frequencies)
    meta = {}
    msg = decay_check(f, grid)
    if msg is not None:
        meta["truncation"] = msg
    return SpectralCoefficients(grid, _frozen(values), meta)


def _inverse_matrix(grid, x):
    return normalized_j(grid.order, np.multiply.outer(np.abs(x), grid.frequencies)) * grid.inverse_weights


def hankel_inverse(coeffs, grid, x):
    """Inverse transform of coefficients at points ``x``."""
    if not coeffs.grid.same_as(grid):
        raise UsageError("spectral coefficients were computed on a different grid")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=np.float64)
    out = _inverse_matrix(grid, x.reshape(-1)) @ coeffs.values
    return float(out[0]) if scalar else out.reshape(x.shape)


@dataclass(frozen=True)
class GreenBranch:
    """Branch of the Green multiplier for parameter k.

    Regular for k >= 0, FreeA for negative k off the odd integers (free
    constant ``A``), Exceptional for k = -1, -3, ... (free constant ``B``).
    """

    k: float
    branch: str
    A: complex = 0
    B: complex = 0

    def __post_init__(self):
        expected = branch_for(self.k)
        if self.branch != expected:
            raise UsageError(f"k={self.k:g} belongs to the {expected} branch, not {self.branch}")

    @classmethod
    def for_k(cls, k, A=0, B=0):
        return cls(float(k), branch_for(k), A, B)


def branch_for(k):
    if k >= 0:
        return "Regular"
    q = 2 * round((k - 1.0) / 2.0) + 1
    if abs(k - q) <= 1e-12:
        return "Exceptional"
    return "FreeA"


def _real_if_possible(v):
    v = np.asarray(v)
    if np.iscomplexobj(v) and not np.any(v.imag):
        v = v.real
    return v


def green_multiplier(branch, xi, t):
    """G^k(xi, t) for the chosen branch; equals 1 at t = 0 where defined."""
    scalar = np.ndim(xi) == 0 and np.ndim(t) == 0
    xi, t = np.broadcast_arrays(np.abs(np.asarray(xi, dtype=np.float64)),
                                np.asarray(t, dtype=np.float64))
    k = branch.k
    z = xi * t
    if branch.branch == "Regular":
        out = normalized_j(0.5 * (k - 1.0), z)
    elif branch.branch == "FreeA":
        out = hyp0f1(0.5 * (k + 1.0), -0.25 * z * z)
        if branch.A != 0:
            mu = 0.5 * (1.0 - k)
            out = out + branch.A * np.abs(t) ** mu * bessel_j(mu, np.abs(z))
    else:
        if np.any(t <= 0):
            raise DomainError("the exceptional Green multiplier is singular at t = 0")
        mu = 0.5 * (1.0 - k)
        out = np.ones(z.shape)
        live = z > 0
        if live.any():
            zl = z[live]
            out[live] = -math.pi * 2.0 ** (0.5 * (k - 1.0)) / gamma(mu) * zl ** mu * bessel_y(mu, zl)
        if branch.B != 0:
            out = out + branch.B * t ** mu * bessel_j(mu, z)
    out = _real_if_possible(out)
    return out.reshape(()).item() if scalar else out


def spectral_solve(spec, grid, x, t, branch=None):
    """Spectral solution for n = 1: inverse transform of G^k(xi, t) F f(xi).

    ``x`` and ``t`` broadcast against each other. A datum that has not
    decayed at the radius triggers a TruncationWarning.
    """
    if spec.n != 1:
        raise UsageError(f"the spectral route is one-dimensional, got n={spec.n}")
    if float(spec.gamma[0]) != grid.gamma:
        raise UsageError(f"grid built for gamma={grid.gamma:g}, problem has gamma={spec.gamma[0]:g}")
    if branch is None:
        branch = GreenBranch.for_k(spec.k)
    coeffs = hankel_forward(spec.datum.f, grid)
    if "truncation" in coeffs.metadata:
        warnings.warn(coeffs.metadata["truncation"], TruncationWarning, stacklevel=2)
    scalar = np.ndim(x) == 0 and np.ndim(t) == 0
    xb, tb = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(t, dtype=np.float64))
    xf, tf = xb.reshape(-1), np.abs(tb.reshape(-1))
    mult = green_multiplier(branch, grid.frequencies[None, :], tf[:, None])
    out = np.sum(_inverse_matrix(grid, xf) * mult * coeffs.values[None, :], axis=1)
    out = _real_if_possible(out)
    return out.item() if scalar else out.reshape(xb.shape)
