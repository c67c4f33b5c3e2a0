"""Verification suites run by ``epdkit verify`` and ``compare-routes``.

Every check yields ``Check(name, status, measured, tolerance)`` with status
``pass``, ``fail`` or ``skip``.
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np
from numpy.polynomial import polynomial as P

from .epd import (ProblemSpec, classify, pde_residual, solve, solve_descent, solve_direct,
                  solver_for)
from .errors import TruncationWarning, UsageError
from .hankel import (GreenBranch, SpectralGrid, bessel_zeros, decay_check, green_multiplier,
                     hankel_forward, hankel_inverse, spectral_solve)
from .quadrature import angular_rule
from .scenario import build_datum
from .specfun import bessel_j, gamma as gamma_fn, hyp0f1, normalized_j
from .translation import EvenFunction, spherical_mean_batch, translate_1d

SUITES = ("all", "translation", "epd", "hankel")


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    measured: float
    tolerance: float

    def line(self):
        return f"{self.name},{self.status},{self.measured:.6e},{self.tolerance:.1e}"


def _check(name, measured, tol):
    measured = float(measured)
    ok = math.isfinite(measured) and measured <= tol
    return Check(name, "pass" if ok else "fail", measured, tol)


def _skip(name, tol):
    return Check(name, "skip", float("nan"), tol)


def _subsample(axis, count):
    if axis.size <= count:
        return axis
    return axis[np.linspace(0, axis.size - 1, count).round().astype(int)]


def _mesh_points(x_axes, t_axis):
    mesh = np.meshgrid(t_axis, *x_axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh[1:]], axis=1), mesh[0].ravel()


# Closed forms

def closed_form(cfg, k=None):
    """A callable u(x_batch, t_batch) solving the problem independently of
    the quadrature solvers, or None if the datum has none."""
    k = cfg.k if k is None else float(k)
    n = cfg.n
    if cfg.window is not None:
        return None
    if cfg.datum == "jbessel":
        b = 0.5 * (k + 1.0)
        if b <= 0 and b == math.floor(b):
            return None
        f = cfg.initial_datum().f
        return lambda x, t: f(x) * hyp0f1(b, -0.25 * n * np.asarray(t) ** 2)
    if cfg.datum in ("const", "poly_x2", "custom-series"):
        datum = cfg.initial_datum()
        powers = [p for p in datum.laplace_powers]
        coeffs = []
        c = 1.0
        for h in range(1, len(powers) + 1):
            denom = k + 2 * h - 1
            if denom == 0:
                probe = np.linspace(0.5, 1.5, 3)[:, None] * np.ones((1, n))
                if np.any(powers[h - 1](probe)):
                    return None
                break
            c /= denom * 2.0 * h
            coeffs.append(c)

        def u(x, t):
            t2 = np.asarray(t, dtype=np.float64) ** 2
            out = np.asarray(datum.f(x), dtype=np.float64)
            tp = np.ones_like(t2)
            for ch, lap in zip(coeffs, powers):
                tp = tp * t2
                out = out + ch * tp * lap(x)
            return out
        return u
    return None


def _tolerance_for(regime):
    return {"Direct": 1e-6, "Boundary": 1e-6, "Descent": 1e-4}.get(regime.tag, 1e-12)


# Suites

def translation_suite(cfg):
    num = cfg.numerics
    g0 = cfg.gamma[0]
    checks = []
    rng = np.random.default_rng(0)
    x = rng.uniform(0.0, 2.0, size=(5, cfg.n))
    one = EvenFunction(lambda p: np.ones(p.shape[0]), cfg.n)
    mean = spherical_mean_batch(one, cfg.gamma, x, rng.uniform(0.1, 2.0, 5), num.resolution, num.quad_n)
    checks.append(_check("translation.normalization", np.max(np.abs(mean - 1.0)), 1e-12))

    rule = angular_rule(g0, num.quad_n)
    gauss1 = EvenFunction(lambda p: np.exp(-0.5 * p[:, 0] ** 2))
    grid = np.linspace(0.1, 2.0, 10)
    asym = max(abs(translate_1d(gauss1, g0, a, b, rule) - translate_1d(gauss1, g0, b, a, rule))
               / abs(translate_1d(gauss1, g0, a, b, rule)) for a in grid for b in grid)
    checks.append(_check("translation.symmetry", asym, 1e-12))

    nu = 0.5 * (g0 - 1.0)
    jf = EvenFunction(lambda p: normalized_j(nu, p[:, 0]))
    prod = max(abs(translate_1d(jf, g0, a, b, rule) - normalized_j(nu, a) * normalized_j(nu, b))
               for a in grid for b in grid)
    checks.append(_check("translation.product_formula", prod, 1e-10))

    datum = build_datum("gaussian", cfg.n, cfg.gamma)
    f, lap = datum.f, datum.laplace_powers[0]
    axis = np.linspace(0.3, 1.5, 3)
    xb, tb = _mesh_points([axis] * cfg.n, axis)
    kb = cfg.n + math.fsum(cfg.gamma) - 1.0
    h = 1e-3

    def mean_at(func, t):
        return spherical_mean_batch(func, cfg.gamma, xb, t, num.resolution, num.quad_n)
    mp, m0, mm = mean_at(f, tb + h), mean_at(f, tb), mean_at(f, tb - h)
    bessel = (mp - 2 * m0 + mm) / h ** 2 + kb / tb * (mp - mm) / (2 * h)
    checks.append(_check("translation.transmutation",
                         np.max(np.abs(bessel - mean_at(lap, tb))), 1e-5))

    x0 = xb[: 3]
    init = np.max(np.abs(mean_at(f, np.zeros(xb.shape[0])) - f(xb)))
    checks.append(_check("translation.initial_value", init, 1e-12))
    hh = 1e-4
    slope = np.max(np.abs(spherical_mean_batch(f, cfg.gamma, x0, np.full(3, hh))
                          - spherical_mean_batch(f, cfg.gamma, x0, np.full(3, -hh))) / (2 * hh))
    checks.append(_check("translation.initial_slope", slope, 1e-8))
    return checks


def epd_suite(cfg):
    num = cfg.numerics
    spec = cfg.problem()
    regime = classify(spec)
    checks = []
    x_axes = [_subsample(a.values(), 9) for a in cfg.x_axes]
    t_axis = _subsample(cfg.t_axis.values(), 9)
    xb, tb = _mesh_points(x_axes, t_axis)
    u = solver_for(spec, num)

    exact = None if cfg.closed_form == "none" else closed_form(cfg, cfg.closed_form_k)
    if exact is None:
        checks.append(_skip("epd.closed_form", _tolerance_for(regime)))
    else:
        dev = np.max(np.abs(u(xb, tb) - exact(xb, tb)))
        checks.append(_check("epd.closed_form", dev, _tolerance_for(regime)))

    x0 = _mesh_points(x_axes, np.zeros(1))[0]
    f0 = spec.datum.f(x0)
    checks.append(_check("epd.initial_value", np.max(np.abs(u(x0, np.zeros(len(x0))) - f0)), 1e-8))
    h = 1e-4
    slope = np.abs(u(x0, np.full(len(x0), h)) - u(x0, np.full(len(x0), -h))) / (2 * h)
    checks.append(_check("epd.initial_slope", np.max(slope), 1e-6))

    interior = [a[(a > 0)] for a in x_axes]
    ti = t_axis[t_axis >= 0.2]
    if all(a.size for a in interior) and ti.size:
        xi, tii = _mesh_points(interior, ti)
        res = pde_residual(spec, u, xi, tii, num.fd_step)
        checks.append(_check("epd.pde_residual", np.max(res), 1e-4))
    else:
        checks.append(_skip("epd.pde_residual", 1e-4))

    const = ProblemSpec(spec.n, spec.gamma, spec.k, build_datum("const", cfg.n, cfg.gamma, constant=2.5))
    cu = solve(const, xb[:5], tb[:5], num)[0]
    checks.append(_check("epd.constant_preservation", np.max(np.abs(cu - 2.5)) / 2.5, 1e-10))

    if regime.tag == "Direct":
        pts, ts = xb[tb > 0][:25], tb[tb > 0][:25]
        gap = np.max(np.abs(solve_descent(spec, pts, ts, num, m=1) - solve_direct(spec, pts, ts, num)))
        checks.append(_check("epd.weinstein", gap, 1e-5))
    else:
        checks.append(_skip("epd.weinstein", 1e-5))
    return checks


def green_ode_residual(branch, xi, t, h=1e-3):
    """|G'' + (k/t) G' + xi^2 G| by fourth-order central differences in t."""
    g = [np.asarray(green_multiplier(branch, xi, t + o * h), dtype=np.float64)
         for o in (-2, -1, 0, 1, 2)]
    d1 = (g[0] - 8 * g[1] + 8 * g[3] - g[4]) / (12 * h)
    d2 = (-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) / (12 * h * h)
    return np.abs(d2 + branch.k / t * d1 + xi ** 2 * g[2])


def gaussian_family(coeffs, g):
    """f = p(x^2) exp(-x^2/2) for n = 1 and its Laplace-Bessel image."""
    dim = 1.0 + g
    p = np.asarray(coeffs, dtype=np.float64)
    d1 = P.polyder(p) if p.size > 1 else np.zeros(1)
    d2 = P.polyder(p, 2) if p.size > 2 else np.zeros(1)
    lap = P.polyadd(4.0 * P.polymulx(P.polyadd(P.polysub(d2, d1), 0.25 * p)),
                    2.0 * dim * P.polysub(d1, 0.5 * p))
    f = EvenFunction(lambda x: P.polyval(x[:, 0] ** 2, p) * np.exp(-0.5 * x[:, 0] ** 2))
    lf = EvenFunction(lambda x: P.polyval(x[:, 0] ** 2, lap) * np.exp(-0.5 * x[:, 0] ** 2))
    return f, lf


def hankel_suite(cfg):
    names = ("hankel.zeros", "hankel.gaussian_forward", "hankel.round_trip", "hankel.symbol",
             "hankel.green_ode", "hankel.route_equivalence")
    tols = (1e-10, 1e-8, 1e-6, 1e-6, 1e-6, cfg.compare_tolerance)
    if cfg.n != 1:
        return [_skip(nm, tol) for nm, tol in zip(names, tols)]
    num = cfg.numerics
    g = cfg.gamma[0]
    nu = 0.5 * (g - 1.0)
    checks = []
    if nu >= -0.5:
        z = bessel_zeros(nu, 32)
        checks.append(_check(names[0], np.max(np.abs(bessel_j(nu, z))), tols[0]))
    else:
        checks.append(_skip(names[0], tols[0]))

    grid12 = SpectralGrid.build(g, num.spectral_m, 12.0)
    gauss = EvenFunction(lambda x: np.exp(-0.5 * x[:, 0] ** 2))
    coef = hankel_forward(gauss, grid12)
    sel = grid12.frequencies <= 5.0
    expect = 2.0 ** nu * gamma_fn(nu + 1.0) * np.exp(-0.5 * grid12.frequencies[sel] ** 2)
    checks.append(_check(names[1], np.max(np.abs(coef.values[sel] - expect) / expect), tols[1]))
    xs = np.linspace(0.0, 6.0, 61)
    checks.append(_check(names[2], np.max(np.abs(hankel_inverse(coef, grid12, xs)
                                                 - np.exp(-0.5 * xs ** 2))), tols[2]))

    grid = SpectralGrid.build(g, num.spectral_m, num.spectral_r)
    worst = 0.0
    for coeffs in ((1.0,), (0.0, 1.0), (1.0, 0.0, 0.5)):
        f, lf = gaussian_family(coeffs, g)
        ff = hankel_forward(f, grid).values
        lff = hankel_forward(lf, grid).values
        worst = max(worst, np.max(np.abs(lff + grid.frequencies ** 2 * ff)) / np.max(np.abs(ff)))
    checks.append(_check(names[3], worst, tols[3]))

    branch = GreenBranch.for_k(cfg.k)
    xi, t = np.meshgrid(np.linspace(0.0, 3.0, 7), np.linspace(0.1 if branch.branch == "Exceptional"
                                                              else 0.05, 2.0, 7))
    checks.append(_check(names[4], np.max(green_ode_residual(branch, xi.ravel(), t.ravel())), tols[4]))

    checks.append(route_equivalence(cfg, grid))
    return checks


def route_equivalence(cfg, grid=None):
    """Max |spectral - quadrature| on the scenario grid restricted to
    [0.2, 2] in x and t (subsampled to 9 points per axis)."""
    name, tol = "hankel.route_equivalence", cfg.compare_tolerance
    if cfg.n != 1:
        return _skip(name, tol)
    spec = cfg.problem()
    if classify(spec).tag.startswith("Exceptional"):
        return _skip(name, tol)
    num = cfg.numerics
    if grid is None:
        grid = SpectralGrid.build(cfg.gamma[0], num.spectral_m, num.spectral_r)
    if decay_check(spec.datum.f, grid) is not None and cfg.window is None:
        return _skip(name, tol)
    xa = _subsample(cfg.x_axes[0].values(), 9)
    ta = _subsample(cfg.t_axis.values(), 9)
    xa = xa[(xa >= 0.2) & (xa <= 2.0)]
    ta = ta[(ta >= 0.2) & (ta <= 2.0)]
    if not (xa.size and ta.size):
        xa = ta = np.linspace(0.2, 2.0, 5)
    xb, tb = _mesh_points([xa], ta)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        spectral = spectral_solve(spec, grid, xb[:, 0], tb)
    quad = solve(spec, xb, tb, num)[0]
    return _check(name, np.max(np.abs(spectral - quad)), tol)


def run_suites(cfg, suite="all"):
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    checks = []
    if suite in ("all", "translation"):
        checks += translation_suite(cfg)
    if suite in ("all", "epd"):
        checks += epd_suite(cfg)
    if suite in ("all", "hankel"):
        checks += hankel_suite(cfg)
    return checks
