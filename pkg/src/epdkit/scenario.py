"""Scenario configuration files and initial-datum presets.

Format: one ``key = value`` per line, dotted keys, ``#`` comments. Numbers
may be written as fractions (``2/3``); lists are comma separated.

    problem.n = 1
    problem.gamma = 2/3
    problem.k = 5/2
    problem.datum = jbessel
    grid.x.min = 0
    grid.x.max = 2
    grid.x.count = 21
    grid.t.min = 0
    grid.t.max = 2
    grid.t.count = 21

Per-coordinate ranges use ``grid.x1.*``, ``grid.x2.*`` and override
``grid.x.*``.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import hashlib
import math
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as P

from .epd import InitialDatum, Numerics, ProblemSpec, default_quad_n
from .errors import ConfigError
from .specfun import normalized_j
from .translation import EvenFunction, MultiIndexGamma

PRESETS = ("jbessel", "gaussian", "poly_x2", "const", "custom-series")
CLOSED_FORMS = ("auto", "none")
SCENARIO_DIR = Path(__file__).with_name("scenarios")

_SCALAR_KEYS = {
    "problem.n", "problem.gamma", "problem.k", "problem.datum", "problem.window",
    "problem.datum.constant", "problem.datum.coefficients",
    "numerics.quad_n", "numerics.resolution", "numerics.spectral_m", "numerics.spectral_r",
    "numerics.fd_step",
    "output.path", "output.format", "output.residual",
    "verify.closed_form", "verify.closed_form_k",
    "compare.tolerance",
}
_AXIS_FIELDS = ("min", "max", "count")


def parse_number(text, key):
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(key, f"expected a number or fraction, got {text!r}") from None


def parse_int(text, key, minimum=None):
    try:
        value = int(text.strip())
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {value}")
    return value


def parse_bool(text, key):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected true or false, got {text!r}")


def read_pairs(text, source="<config>"):
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not _known_key(key):
            raise ConfigError(key, "unknown configuration key")
        if key in pairs:
            raise ConfigError(key, "key given twice")
        pairs[key] = value
    return pairs


def _known_key(key):
    if key in _SCALAR_KEYS:
        return True
    parts = key.split(".")
    if len(parts) == 3 and parts[0] == "grid" and parts[2] in _AXIS_FIELDS:
        axis = parts[1]
        return axis in ("x", "t") or (axis[0] == "x" and axis[1:].isdigit() and int(axis[1:]) >= 1)
    return False


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    count: int

    def values(self):
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    n: int
    gamma: tuple
    k: float
    datum: str
    x_axes: tuple
    t_axis: Axis
    window: float = None
    constant: float = 1.0
    coefficients: tuple = (0.0, 1.0)
    numerics: Numerics = field(default_factory=Numerics)
    output_path: str = None
    residual: bool = False
    closed_form: str = "auto"
    closed_form_k: float = None
    compare_tolerance: float = 1e-4
    pairs: dict = field(default_factory=dict)

    @property
    def digest(self):
        """sha256 of the normalised key/value pairs."""
        canon = "\n".join(f"{k}={self.pairs[k]}" for k in sorted(self.pairs))
        return hashlib.sha256(canon.encode()).hexdigest()

    def problem(self):
        return ProblemSpec(self.n, MultiIndexGamma(self.gamma), self.k, self.initial_datum())

    def initial_datum(self):
        return build_datum(self.datum, self.n, self.gamma, window=self.window,
                           constant=self.constant, coefficients=self.coefficients)


def _axis(pairs, name, default=None):
    fields = {}
    for f in _AXIS_FIELDS:
        key = f"grid.{name}.{f}"
        if key in pairs:
            fields[f] = pairs[key]
        elif default is not None and f in default:
            fields[f] = default[f]
        else:
            raise ConfigError(key, "missing")
    prefix = f"grid.{name}"
    lo = parse_number(fields["min"], f"{prefix}.min")
    hi = parse_number(fields["max"], f"{prefix}.max")
    count = parse_int(fields["count"], f"{prefix}.count", minimum=2)
    if not hi > lo:
        raise ConfigError(f"{prefix}.max", f"range is empty: max={hi:g} <= min={lo:g}")
    if lo < 0:
        raise ConfigError(f"{prefix}.min",
                          "grids live on the closed positive half-axis; use --reflect for negative values")
    return Axis(lo, hi, count)


def parse_config(text, source="<config>"):
    pairs = read_pairs(text, source)
    for key in ("problem.n", "problem.gamma", "problem.k", "problem.datum"):
        if key not in pairs:
            raise ConfigError(key, "missing")
    n = parse_int(pairs["problem.n"], "problem.n", minimum=1)
    gamma = tuple(parse_number(g, "problem.gamma") for g in pairs["problem.gamma"].split(","))
    if len(gamma) != n:
        raise ConfigError("problem.gamma", f"expected {n} entries, got {len(gamma)}")
    for g in gamma:
        if not g > 0:
            raise ConfigError("problem.gamma", f"entries must be positive, got {g:g}")
    k = parse_number(pairs["problem.k"], "problem.k")
    datum = pairs["problem.datum"]
    if datum not in PRESETS:
        raise ConfigError("problem.datum", f"unknown preset {datum!r}; choose from {', '.join(PRESETS)}")
    window = None
    if pairs.get("problem.window", "none").lower() != "none":
        window = parse_number(pairs["problem.window"], "problem.window")
        if not window > 0:
            raise ConfigError("problem.window", f"window scale must be positive, got {window:g}")
    constant = parse_number(pairs.get("problem.datum.constant", "1"), "problem.datum.constant")
    coefficients = (0.0, 1.0)
    if "problem.datum.coefficients" in pairs:
        coefficients = tuple(parse_number(c, "problem.datum.coefficients")
                             for c in pairs["problem.datum.coefficients"].split(","))
    default_x = {f: pairs[f"grid.x.{f}"] for f in _AXIS_FIELDS if f"grid.x.{f}" in pairs}
    x_axes = tuple(_axis(pairs, f"x{i}", default_x) for i in range(1, n + 1))
    t_axis = _axis(pairs, "t")
    numerics = Numerics(
        quad_n=parse_int(pairs["numerics.quad_n"], "numerics.quad_n", 8)
        if "numerics.quad_n" in pairs else default_quad_n(),
        resolution=parse_int(pairs.get("numerics.resolution", "32"), "numerics.resolution", 4),
        spectral_m=parse_int(pairs.get("numerics.spectral_m", "256"), "numerics.spectral_m", 8),
        spectral_r=parse_number(pairs.get("numerics.spectral_r", "16"), "numerics.spectral_r"),
        fd_step=parse_number(pairs.get("numerics.fd_step", "1e-2"), "numerics.fd_step"),
    )
    if not numerics.spectral_r > 0:
        raise ConfigError("numerics.spectral_r", "must be positive")
    if not 0 < numerics.fd_step < 0.1:
        raise ConfigError("numerics.fd_step", f"must lie in (0, 0.1), got {numerics.fd_step:g}")
    fmt = pairs.get("output.format", "csv")
    if fmt != "csv":
        raise ConfigError("output.format", f"only csv is supported, got {fmt!r}")
    closed_form = pairs.get("verify.closed_form", "auto")
    if closed_form not in CLOSED_FORMS:
        raise ConfigError("verify.closed_form", f"expected one of {', '.join(CLOSED_FORMS)}")
    closed_k = None
    if "verify.closed_form_k" in pairs:
        closed_k = parse_number(pairs["verify.closed_form_k"], "verify.closed_form_k")
    return ScenarioConfig(
        n=n, gamma=gamma, k=k, datum=datum, x_axes=x_axes, t_axis=t_axis,
        window=window, constant=constant, coefficients=coefficients, numerics=numerics,
        output_path=pairs.get("output.path"),
        residual=parse_bool(pairs.get("output.residual", "false"), "output.residual"),
        closed_form=closed_form, closed_form_k=closed_k,
        compare_tolerance=parse_number(pairs.get("compare.tolerance", "1e-4"), "compare.tolerance"),
        pairs=pairs,
    )


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))


def example_config(example_id):
    path = SCENARIO_DIR / f"example{int(example_id)}.cfg"
    if not path.exists():
        raise ConfigError("--id", f"no example {example_id}; available: 1, 2")
    return load_config(path)


# Presets

def radial_polynomial_powers(coeffs, dim, limit=64):
    """Iterated Delta_gamma of sum_j c_j |x|^(2j) as polynomials in s = |x|^2.

    For F(s), Delta_gamma F = 4 s F'' + 2 d F' with d = n + |gamma|. The
    list ends with the first zero polynomial.
    """
    out = []
    p = np.trim_zeros(np.asarray(coeffs, dtype=np.float64), "b")
    for _ in range(limit):
        if p.size == 0:
            break
        d1 = P.polyder(p) if p.size > 1 else np.zeros(1)
        d2 = P.polyder(p, 2) if p.size > 2 else np.zeros(1)
        p = np.trim_zeros(P.polyadd(4.0 * P.polymulx(d2), 2.0 * dim * d1), "b")
        out.append(p.copy())
    if not out or out[-1].size:
        out.append(np.zeros(0))
    return out


def gaussian_powers(dim, count):
    """Delta_gamma^h exp(-s/2) = Q_h(s) exp(-s/2); returns Q_1..Q_count."""
    out = []
    p = np.ones(1)
    for _ in range(count):
        d1 = P.polyder(p) if p.size > 1 else np.zeros(1)
        d2 = P.polyder(p, 2) if p.size > 2 else np.zeros(1)
        # F = p e, F' = (p' - p/2) e, F'' = (p'' - p' + p/4) e
        f1 = P.polysub(d1, 0.5 * p)
        f2 = P.polyadd(P.polysub(d2, d1), 0.25 * p)
        p = P.polyadd(4.0 * P.polymulx(f2), 2.0 * dim * f1)
        out.append(p.copy())
    return out


def _radial(p, weight=None):
    coeffs = np.asarray(p, dtype=np.float64)

    def func(x):
        s = np.sum(x * x, axis=1)
        v = P.polyval(s, coeffs) if coeffs.size else np.zeros_like(s)
        return v if weight is None else v * weight(s)
    return func


def build_datum(name, n, gamma, window=None, constant=1.0, coefficients=(0.0, 1.0)):
    """InitialDatum for a preset; analytic Laplace-Bessel powers when known.

    A window multiplies the datum by exp(-|x|^2 / window^2) and drops the
    analytic powers.
    """
    gamma = tuple(float(g) for g in gamma)
    dim = n + math.fsum(gamma)
    powers = None
    if name == "jbessel":
        orders = [0.5 * (g - 1.0) for g in gamma]

        def base(x):
            out = np.ones(x.shape[0])
            for i, nu in enumerate(orders):
                out = out * normalized_j(nu, x[:, i])
            return out
        powers = tuple(EvenFunction(lambda x, h=h: (-float(n)) ** h * base(x), n)
                       for h in range(1, 9))
    elif name == "gaussian":
        def base(x):
            return np.exp(-0.5 * np.sum(x * x, axis=1))
        powers = tuple(EvenFunction(_radial(q, lambda s: np.exp(-0.5 * s)), n)
                       for q in gaussian_powers(dim, 8))
    elif name in ("poly_x2", "const", "custom-series"):
        if name == "poly_x2":
            coeffs = (0.0, 1.0)
        elif name == "const":
            coeffs = (float(constant),)
        else:
            coeffs = tuple(float(c) for c in coefficients)
        base = _radial(coeffs)
        powers = tuple(EvenFunction(_radial(q), n) for q in radial_polynomial_powers(coeffs, dim))
    else:
        raise ConfigError("problem.datum", f"unknown preset {name!r}")
    if window is not None:
        scale = float(window)
        inner = base

        def base(x):
            return inner(x) * np.exp(-np.sum(x * x, axis=1) / (scale * scale))
        powers = None
        name = f"{name}*window({scale:g})"
    return InitialDatum(EvenFunction(base, n, name=name), powers, None, name)
