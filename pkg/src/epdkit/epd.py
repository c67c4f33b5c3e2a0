"""Cauchy problem for the Euler-Poisson-Darboux equation

    u_tt + (k/t) u_t = Delta_gamma u,   u(x, 0) = f(x),  u_t(x, 0) = 0,

with Delta_gamma = sum_i (d^2/dx_i^2 + (gamma_i/x_i) d/dx_i), for every
real k:

* Direct      k > n+|gamma|-1   weighted-ball integral of translates
* Boundary    k = n+|gamma|-1   weighted spherical mean
* Descent     k below that      u = t^(1-k) (d/(t dt))^m (t^(k+2m-1) u(k+2m))
* Exceptional k = -1, -3, ...   finite series in powers of Delta_gamma f

Solvers take one point ``x`` (length n) with scalar ``t``, or batches
``x`` of shape ``(P, n)`` with ``t`` of shape ``(P,)``. Solutions are even
in t, so negative times are reflected.
"""
from dataclasses import dataclass, field, replace
import math
import os
import warnings

import numpy as np

from .errors import ConfigError, PreconditionError, UsageError
from .quadrature import jacobi_rule
from .translation import (DEFAULT_RESOLUTION, EvenFunction, MultiIndexGamma,
                          as_gamma, spherical_mean_batch)

TOL = 1e-12
DEFAULT_QUAD_N = 64


def default_quad_n():
    """Quadrature size, overridable through ``EPD_QUAD_N`` (integer >= 8)."""
    raw = os.environ.get("EPD_QUAD_N")
    if raw is None or raw.strip() == "":
        return DEFAULT_QUAD_N
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError("EPD_QUAD_N", f"expected an integer, got {raw!r}") from None
    if value < 8:
        raise ConfigError("EPD_QUAD_N", f"must be >= 8, got {value}")
    return value


@dataclass(frozen=True)
class Numerics:
    quad_n: int = field(default_factory=default_quad_n)
    resolution: int = DEFAULT_RESOLUTION
    spectral_m: int = 256
    spectral_r: float = 16.0
    fd_step: float = 1e-2


@dataclass(frozen=True, eq=False)
class InitialDatum:
    """Even datum f, optionally with analytic Delta_gamma^h f for h = 1, 2, ...

    ``smoothness=None`` declares f infinitely smooth.
    """

    f: EvenFunction
    laplace_powers: tuple = None
    smoothness: int = None
    name: str = ""

    def __post_init__(self):
        if self.smoothness is not None and self.smoothness < 2:
            raise PreconditionError(f"declared smoothness must be >= 2, got {self.smoothness}")
        if self.laplace_powers is not None:
            object.__setattr__(self, "laplace_powers", tuple(self.laplace_powers))

    @property
    def dim(self):
        return self.f.dim

    def scaled(self, factor):
        """The datum f / factor."""
        inv = 1.0 / factor
        f = self.f
        g = EvenFunction(lambda p, _f=f: inv * _f(p), f.dim, f.smoothness, f.name)
        powers = None
        if self.laplace_powers is not None:
            powers = tuple(EvenFunction(lambda p, _h=h: inv * _h(p), h.dim) for h in self.laplace_powers)
        return replace(self, f=g, laplace_powers=powers)


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    n: int
    gamma: MultiIndexGamma
    k: float
    datum: InitialDatum

    def __post_init__(self):
        object.__setattr__(self, "gamma", as_gamma(self.gamma))
        object.__setattr__(self, "k", float(self.k))
        if not math.isfinite(self.k):
            raise UsageError(f"k must be finite, got {self.k}")
        if self.gamma.n != self.n:
            raise UsageError(f"gamma has {self.gamma.n} entries but n = {self.n}")
        if self.datum.dim != self.n:
            raise UsageError(f"datum has dimension {self.datum.dim} but n = {self.n}")

    @property
    def boundary_k(self):
        """n + |gamma| - 1, the value of k where the spherical mean applies."""
        return self.n + self.gamma.abs - 1.0

    def with_k(self, k, datum=None):
        return ProblemSpec(self.n, self.gamma, k, self.datum if datum is None else datum)


@dataclass(frozen=True)
class Regime:
    tag: str
    m: int = None

    def __str__(self):
        return self.tag if self.m is None else f"{self.tag}(m={self.m})"


def odd_negative(k):
    """The odd negative integer within TOL of k, or None."""
    q = 2 * round((k - 1.0) / 2.0) + 1
    if q < 0 and abs(k - q) <= TOL:
        return int(q)
    return None


def classify(spec):
    b = spec.boundary_k
    k = spec.k
    if abs(k - b) <= TOL:
        return Regime("Boundary")
    if k > b:
        return Regime("Direct")
    q = odd_negative(k)
    if q == -1:
        return Regime("ExceptionalMinusOne")
    if q is not None:
        return Regime("ExceptionalSeries")
    return Regime("Descent", math.ceil((b - k) / 2.0 - TOL))


def _batch(spec, x, t):
    x = np.asarray(x, dtype=np.float64)
    single = x.size == spec.n and np.ndim(t) == 0
    xb = np.abs(x).reshape(-1, spec.n)
    tb = np.abs(np.broadcast_to(np.asarray(t, dtype=np.float64).reshape(-1), xb.shape[:1]))
    return xb, np.ascontiguousarray(tb), single


def _finish(out, single):
    return float(out[0]) if single else out


def _numerics(numerics):
    return Numerics() if numerics is None else numerics


def _direct_batch(spec, xb, tb, num):
    out = np.empty(tb.shape)
    zero = tb == 0.0
    if zero.any():
        out[zero] = spec.datum.f(xb[zero])
    live = ~zero
    if live.any():
        lam = 0.5 * (spec.k - spec.n - spec.gamma.abs - 1.0)
        rule = jacobi_rule(lam, spec.boundary_k, num.quad_n)
        r = rule.nodes
        radii = (tb[live][:, None] * r[None, :]).ravel()
        xs = np.repeat(xb[live], r.size, axis=0)
        means = spherical_mean_batch(spec.datum.f, spec.gamma, xs, radii,
                                     num.resolution, num.quad_n)
        out[live] = means.reshape(-1, r.size) @ (rule.weights / rule.weights.sum())
    return out


def solve_direct(spec, x, t, numerics=None):
    """Weighted-ball integral of generalized translates, for k > n+|gamma|-1.

    At t = 0 returns f(x).
    """
    if classify(spec).tag != "Direct":
        raise UsageError(
            f"solve_direct needs k > n+|gamma|-1 = {spec.boundary_k:g}, got k={spec.k:g} "
            f"({classify(spec)})")
    xb, tb, single = _batch(spec, x, t)
    return _finish(_direct_batch(spec, xb, tb, _numerics(numerics)), single)


def solve_boundary(spec, x, t, numerics=None):
    """Weighted spherical mean, for k = n+|gamma|-1."""
    if classify(spec).tag != "Boundary":
        raise UsageError(
            f"solve_boundary needs k = n+|gamma|-1 = {spec.boundary_k:g}, got k={spec.k:g}")
    num = _numerics(numerics)
    xb, tb, single = _batch(spec, x, t)
    out = spherical_mean_batch(spec.datum.f, spec.gamma, xb, tb, num.resolution, num.quad_n)
    return _finish(out, single)


def descent_depth(spec, m=None):
    """Number of (d/(t dt)) applications used by the descent solver.

    The minimal m with k + 2m >= n+|gamma|-1, bumped by one when k + 2m hits
    the boundary value, so the inner problem is always a Direct one. An
    explicit ``m`` is validated instead.
    """
    b = spec.boundary_k
    if m is None:
        m = max(1, math.ceil((b - spec.k) / 2.0 - TOL))
        if abs(spec.k + 2 * m - b) <= TOL:
            m += 1
        return m
    m = int(m)
    if m < 1 or not spec.k + 2 * m > b + TOL:
        raise UsageError(f"descent depth m={m} does not lift k={spec.k:g} above {b:g}")
    return m


def _required_smoothness(spec):
    return int(math.floor((spec.n + spec.gamma.abs - spec.k) / 2.0)) + 2


def _descent_step(tau):
    return np.maximum(1e-3, 1e-2 * tau)


def _apply_descent(v, powers, xb, tau):
    """V_m for V_0 = v and V_j = p_j V_{j-1} + t V_{j-1}'.

    Since (d/(t dt)) (t^p w) = t^(p-2) (p w + t w'), the m-fold operator on
    t^(k+2m-1) u(k+2m) equals t^(k-1) V_m with p_j = k+2m+1-2j. Only the
    smooth, even inner solution is differenced, so stencils may cross t = 0.
    Each derivative is a central difference with one Richardson level.
    """
    if not powers:
        return v(xb, tau)
    p, rest = powers[-1], powers[:-1]
    h = _descent_step(tau)
    taus = np.concatenate([tau, tau + h, tau - h, tau + 0.5 * h, tau - 0.5 * h])
    xs = np.concatenate([xb] * 5)
    w = _apply_descent(v, rest, xs, taus).reshape(5, -1)
    coarse = (w[1] - w[2]) / (2.0 * h)
    fine = (w[3] - w[4]) / h
    return p * w[0] + tau * (4.0 * fine - coarse) / 3.0


def solve_descent(spec, x, t, numerics=None, m=None):
    """Descent from the Direct solution at k + 2m with datum
    f / ((k+1)(k+3)...(k+2m-1)).

    ``m`` may be forced to any depth that lifts k above n+|gamma|-1, which
    also allows routing a Direct problem through descent. At t = 0 returns
    f(x).
    """
    regime = classify(spec)
    if m is None and regime.tag != "Descent":
        raise UsageError(f"solve_descent needs a Descent regime, got {regime} for k={spec.k:g}")
    if odd_negative(spec.k) is not None:
        raise UsageError(f"k={spec.k:g} is an odd negative integer; use solve_exceptional")
    smooth = spec.datum.smoothness
    need = _required_smoothness(spec)
    if smooth is not None and smooth < need:
        raise PreconditionError(
            f"descent at k={spec.k:g} needs a datum of smoothness class C^{need}, "
            f"declared C^{smooth}")
    num = _numerics(numerics)
    m = descent_depth(spec, m)
    k = spec.k
    lifted = k + 2 * m
    scale = math.prod(k + 2 * i - 1 for i in range(1, m + 1))
    inner = spec.with_k(lifted, spec.datum.scaled(scale))
    # p_1 = k+2m-1 is applied first (innermost), p_m = k+1 last
    powers = tuple(k + 2.0 * j - 1.0 for j in range(1, m + 1))

    def inner_solution(xs, taus):
        return _direct_batch(inner, xs, np.abs(taus), num)

    xb, tb, single = _batch(spec, x, t)
    out = _apply_descent(inner_solution, powers, xb, tb)
    zero = tb == 0.0
    if zero.any():
        out[zero] = spec.datum.f(xb[zero])
    return _finish(out, single)


def _fd_laplace_power(f, gam, order):
    g = f
    for _ in range(order):
        g = EvenFunction(
            lambda p, _g=g: laplace_bessel_apply(_g, gam, p, step=None), f.dim)
    return g


def series_coefficients(k):
    """c_h = 1 / ((k+1)(k+3)...(k+2h-1) * 2*4*...*2h) for h = 1..-(k+1)/2."""
    q = odd_negative(k)
    if q is None:
        raise UsageError(f"k={k:g} is not an odd negative integer")
    depth = -(q + 1) // 2
    coeffs = []
    c = 1.0
    for h in range(1, depth + 1):
        c /= (q + 2 * h - 1) * (2.0 * h)
        coeffs.append(c)
    return coeffs


def solve_exceptional(spec, x, t, numerics=None):
    """Finite series for k = -1, -3, -5, ...

    u = f + sum_h c_h t^(2h) Delta_gamma^h f; needs Delta^h f for
    h = 1..-(k+1)/2. Analytic powers on the datum are used when present;
    otherwise they are approximated by iterated finite differences, with a
    warning.
    """
    q = odd_negative(spec.k)
    if q is None:
        raise UsageError(f"solve_exceptional needs k in {{-1, -3, ...}}, got k={spec.k:g}")
    xb, tb, single = _batch(spec, x, t)
    f = spec.datum.f
    out = f(xb).astype(np.float64).reshape(-1)
    coeffs = series_coefficients(q)
    depth = len(coeffs)
    if depth == 0:
        return _finish(out, single)
    powers = spec.datum.laplace_powers
    if powers is None:
        warnings.warn(
            f"no analytic Laplace-Bessel powers supplied; using iterated finite differences "
            f"up to order {depth}, accuracy degrades with each order", RuntimeWarning, stacklevel=2)
        powers = tuple(_fd_laplace_power(f, spec.gamma, h) for h in range(1, depth + 1))
    elif len(powers) < depth:
        # a vanishing last power means every higher power vanishes too
        if not powers or np.any(np.asarray(powers[-1](xb), dtype=np.float64) != 0.0):
            raise PreconditionError(
                f"k={q} needs Delta_gamma^h f for h = 1..{depth}; order {len(powers) + 1} is missing")
        powers = powers[:-1] + (powers[-1],) * (depth - len(powers) + 1)
    elif len(powers) > depth:
        beyond = np.asarray(powers[depth](xb), dtype=np.float64)
        scale = max(1.0, float(np.max(np.abs(out))))
        if np.any(np.abs(beyond) > 1e-10 * scale):
            raise PreconditionError(
                f"datum is not B-polyharmonic of order {depth + 1}: Delta_gamma^{depth + 1} f "
                f"is nonzero (max {float(np.max(np.abs(beyond))):.3g})")
    t2 = tb * tb
    tp = np.ones_like(tb)
    for c, lap in zip(coeffs, powers):
        tp = tp * t2
        out = out + c * tp * np.asarray(lap(xb), dtype=np.float64)
    return _finish(out, single)


def solve(spec, x, t, numerics=None):
    """Dispatch on the regime; returns ``(values, regime)``."""
    regime = classify(spec)
    if regime.tag == "Direct":
        return solve_direct(spec, x, t, numerics), regime
    if regime.tag == "Boundary":
        return solve_boundary(spec, x, t, numerics), regime
    if regime.tag == "Descent":
        return solve_descent(spec, x, t, numerics), regime
    return solve_exceptional(spec, x, t, numerics), regime


def solver_for(spec, numerics=None):
    """A callable ``u(x_batch, t_batch)`` for the regime of ``spec``."""
    def u(xb, tb):
        return np.asarray(solve(spec, xb, tb, numerics)[0])
    return u


# Fourth-order central stencils
_D1 = ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12))
_D2 = ((-2, -1.0 / 12), (-1, 16.0 / 12), (0, -30.0 / 12), (1, 16.0 / 12), (2, -1.0 / 12))
_OFFSETS = (-2, -1, 0, 1, 2)


def _coordinate_derivatives(values, step):
    """First and second derivatives from values at offsets -2..2 (axis 0)."""
    d1 = sum(c * values[o + 2] for o, c in _D1) / step
    d2 = sum(c * values[o + 2] for o, c in _D2) / (step * step)
    return d1, d2


def laplace_bessel_apply(f, gam, x, step=1e-3):
    """Delta_gamma f at ``x`` by fourth-order central differences of the
    even extension. On a coordinate hyperplane x_i = 0 the term becomes
    (1 + gamma_i) f''_i. ``step=None`` uses 1e-3 (1 + |x|).
    """
    gam = as_gamma(gam)
    n = gam.n
    x = np.asarray(x, dtype=np.float64)
    single = x.size == n and x.ndim <= 1
    xb = np.abs(x).reshape(-1, n)
    if step is None:
        h = 1e-3 * (1.0 + np.linalg.norm(xb, axis=1))
    else:
        h = np.full(xb.shape[0], float(step))
    pts = []
    for i in range(n):
        for o in _OFFSETS:
            p = xb.copy()
            p[:, i] += o * h
            pts.append(p)
    vals = np.asarray(f(np.concatenate(pts)), dtype=np.float64).reshape(n, 5, -1)
    total = np.zeros(xb.shape[0])
    for i, g in enumerate(gam):
        d1, d2 = _coordinate_derivatives(vals[i], h)
        xi = xb[:, i]
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(xi > 0, d2 + g * d1 / np.where(xi > 0, xi, 1.0), (1.0 + g) * d2)
        total += term
    return float(total[0]) if single else total


def pde_residual(spec, solution, x, t, step=1e-2):
    """|(B_k)_t u - (Delta_gamma)_x u| by fourth-order central differences.

    ``solution(x_batch, t_batch)`` returns u on batches. The time stencil is
    shrunk when t < 2 * step so it stays on t > 0.
    """
    xb, tb, single = _batch(spec, x, t)
    h = np.minimum(float(step), tb / 3.0)
    tvals = np.concatenate([tb + o * h for o in _OFFSETS])
    ut = np.asarray(solution(np.concatenate([xb] * 5), tvals), dtype=np.float64).reshape(5, -1)
    d1, d2 = _coordinate_derivatives(ut, h)
    bessel_t = d2 + spec.k * d1 / tb

    def at_time(p):
        p = np.asarray(p).reshape(-1, spec.n)
        reps = p.shape[0] // tb.size
        return solution(p, np.tile(tb, reps))

    lap = laplace_bessel_apply(EvenFunction(at_time, spec.n), spec.gamma, xb, step=step)
    out = np.abs(bessel_t - np.atleast_1d(lap))
    return _finish(out, single)
