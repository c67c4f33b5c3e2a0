"""Generalized translation, weighted spherical means and the (k, gamma)
translation.

Points live in the closed positive orthant; every function is even in each
coordinate, which is enforced by evaluating at absolute values.

The public operations take a single point or a batch of points ``(P, n)``;
the ``*_batch`` helpers are the vectorised cores used by the solvers.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np

from .errors import DomainError, UsageError
from .quadrature import DEFAULT_SIZE, angular_rule, jacobi_rule
from .specfun import gamma as gamma_fn

DEFAULT_RESOLUTION = 32
CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class MultiIndexGamma:
    """Positive multi-index (gamma_1, ..., gamma_n)."""

    entries: tuple

    def __init__(self, entries):
        if np.ndim(entries) == 0:
            entries = (entries,)
        values = tuple(float(g) for g in entries)
        if not values:
            raise DomainError("gamma must have at least one entry")
        for i, g in enumerate(values):
            if not (g > 0 and math.isfinite(g)):
                raise DomainError(f"gamma[{i}] must be a positive finite real, got {g!r}")
        object.__setattr__(self, "entries", values)

    @property
    def n(self):
        return len(self.entries)

    @property
    def abs(self):
        return math.fsum(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


def as_gamma(g):
    return g if isinstance(g, MultiIndexGamma) else MultiIndexGamma(g)


@dataclass(frozen=True, eq=False)
class EvenFunction:
    """A function on R^n that is even in every coordinate.

    ``func`` receives an array of shape ``(P, dim)`` with non-negative
    entries and returns ``P`` values. Calling the wrapper accepts any
    ``(..., dim)`` array (or a scalar when ``dim == 1``) and reflects the
    coordinates first.
    """

    func: object
    dim: int = 1
    smoothness: int = 2
    name: str = ""
    extra: dict = field(default_factory=dict)

    def points(self, x):
        arr = np.abs(np.asarray(x, dtype=np.float64))
        if arr.ndim == 0 or arr.shape[-1] != self.dim:
            if self.dim != 1:
                raise UsageError(
                    f"point dimension {arr.shape[-1] if arr.ndim else 1} "
                    f"does not match function dimension {self.dim}")
            arr = arr[..., None]
        return arr

    def __call__(self, x):
        arr = self.points(x)
        flat = arr.reshape(-1, self.dim)
        values = np.asarray(self.func(flat), dtype=np.float64)
        if values.shape != (flat.shape[0],):
            values = np.array([float(np.asarray(self.func(p[None, :])).reshape(-1)[0])
                               for p in flat])
        out = values.reshape(arr.shape[:-1])
        return float(out) if out.ndim == 0 else out


def translation_constant(g):
    """Gamma((g+1)/2) / (Gamma(g/2) sqrt(pi)), the reciprocal of the
    sin**(g-1) measure on [0, pi]."""
    return gamma_fn(0.5 * (g + 1.0)) / (gamma_fn(0.5 * g) * math.sqrt(math.pi))


def _check_rule(rule, g):
    if rule.kind != "angular" or rule.params[0] != float(g):
        raise UsageError(
            f"quadrature rule {rule.kind}{rule.params} does not match gamma={float(g):g}; "
            "use angular_rule(gamma, N)")


def as_even(f, dim):
    """Wrap a plain callable on ``(P, dim)`` arrays as an EvenFunction."""
    if isinstance(f, EvenFunction):
        if f.dim != dim:
            raise UsageError(f"function dimension {f.dim} does not match problem dimension {dim}")
        return f
    return EvenFunction(f, dim)


def translate_batch(f, gam, x, y, n_nodes=DEFAULT_SIZE):
    """T^y f(x) for batches ``x``, ``y`` of shape ``(P, n)``; returns ``(P,)``.

    Each coordinate uses its own angular rule; the n-dimensional operator is
    the tensor product. Coordinates where every x or every y in a chunk is
    zero collapse to a single node.
    """
    gam = as_gamma(gam)
    rules = [angular_rule(g, n_nodes) for g in gam]
    return _translate_with_rules(as_even(f, gam.n), rules, x, y)


def _translate_with_rules(f, rules, x, y):
    x = np.abs(np.asarray(x, dtype=np.float64))
    y = np.abs(np.asarray(y, dtype=np.float64))
    n = len(rules)
    x = x.reshape(-1, n)
    y = np.broadcast_to(y.reshape(-1, n), x.shape)
    out = np.empty(x.shape[0])
    per_point = n * math.prod(r.size for r in rules)
    step = max(1, CHUNK_ELEMENTS // per_point)
    for lo in range(0, x.shape[0], step):
        xs, ys = x[lo:lo + step], y[lo:lo + step]
        out[lo:lo + step] = _translate_chunk(f, rules, xs, ys)
    return out


def _translate_chunk(f, rules, xs, ys):
    n = len(rules)
    p = xs.shape[0]
    axes, weights = [], []
    for i, rule in enumerate(rules):
        xi, yi = xs[:, i:i + 1], ys[:, i:i + 1]
        if not xi.any() or not yi.any():
            axes.append(xi + yi)
            weights.append(np.ones(1))
        else:
            c = rule.cos_nodes[None, :]
            axes.append(np.sqrt(np.maximum(xi * xi + yi * yi - 2.0 * xi * yi * c, 0.0)))
            weights.append(rule.weights / rule.weights.sum())
    sizes = [a.shape[1] for a in axes]
    args = np.empty((p, *sizes, n))
    for i, a in enumerate(axes):
        shape = [p] + [1] * n
        shape[i + 1] = sizes[i]
        args[..., i] = a.reshape(shape)
    vals = f(args)
    vals = np.asarray(vals, dtype=np.float64).reshape(p, *sizes)
    for w in reversed(weights):
        vals = vals @ w
    return vals


def translate_1d(f, g, x, y, rule):
    """One-dimensional generalized translation T^y f(x) for scalar x, y.

    ``rule`` must be ``angular_rule(g, N)``. Symmetric in (x, y); y = 0
    returns f(x).
    """
    _check_rule(rule, g)
    return float(_translate_with_rules(as_even(f, 1), [rule], np.array([[x]]), np.array([[y]]))[0])


def translate_nd(f, gam, x, y, n_nodes=DEFAULT_SIZE):
    """Tensor-product generalized translation T^y f(x) for points of R^n."""
    gam = as_gamma(gam)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[-1:] != (gam.n,) or y.shape[-1:] != (gam.n,):
        raise UsageError(
            f"translate_nd needs points of dimension {gam.n}, got x{x.shape} and y{y.shape}")
    x, y = np.broadcast_arrays(x, y)
    out = translate_batch(f, gam, x.reshape(-1, gam.n), y.reshape(-1, gam.n), n_nodes)
    out = out.reshape(x.shape[:-1])
    return float(out) if out.ndim == 0 else out


def sphere_measure(gam):
    """|S_1^+(n)|_gamma = prod Gamma((g_i+1)/2) / (2^(n-1) Gamma((n+|g|)/2))."""
    gam = as_gamma(gam)
    num = math.prod(gamma_fn(0.5 * (g + 1.0)) for g in gam)
    return num / (2.0 ** (gam.n - 1) * gamma_fn(0.5 * (gam.n + gam.abs)))


@lru_cache(maxsize=64)
def _sphere_rule_cached(entries, resolution):
    n = len(entries)
    if n == 1:
        return np.ones((1, 1)), np.ones(1), 1.0
    # theta_1 = c_1, theta_j = s_1...s_{j-1} c_j, theta_n = s_1...s_{n-1}
    # with c_j = cos(phi_j); angle j carries (1-c^2)^{(b-1)/2} c^{gamma_j},
    # b = n-1-j + sum_{i>j} gamma_i
    grids, wts = [], []
    total = 1.0
    for j in range(1, n):
        b = n - 1 - j + math.fsum(entries[j:])
        rule = jacobi_rule(0.5 * (b - 1.0), entries[j - 1], resolution)
        grids.append(rule.nodes)
        wts.append(rule.weights)
        total *= rule.total_weight
    mesh = np.meshgrid(*grids, indexing="ij")
    wmesh = np.meshgrid(*wts, indexing="ij")
    cos_ = [m.ravel() for m in mesh]
    weight = np.prod([w.ravel() for w in wmesh], axis=0)
    theta = np.empty((weight.size, n))
    running = np.ones(weight.size)
    for j in range(n - 1):
        theta[:, j] = running * cos_[j]
        running = running * np.sqrt(np.maximum(1.0 - cos_[j] ** 2, 0.0))
    theta[:, n - 1] = running
    theta.setflags(write=False)
    weight.setflags(write=False)
    return theta, weight / weight.sum(), total


def sphere_rule(gam, resolution=DEFAULT_RESOLUTION):
    """Directions on S_1^+(n) with normalised weights for theta^gamma dS.

    Returns ``(theta, weights, raw_total)``; ``raw_total`` is the unnormalised
    weight sum, which equals ``sphere_measure(gam)``.
    """
    gam = as_gamma(gam)
    return _sphere_rule_cached(gam.entries, int(resolution))


def spherical_mean_batch(f, gam, x, t, resolution=DEFAULT_RESOLUTION, n_nodes=DEFAULT_SIZE):
    """M_t f(x) for ``x`` of shape ``(P, n)`` and ``t`` of shape ``(P,)``."""
    gam = as_gamma(gam)
    x = np.abs(np.asarray(x, dtype=np.float64)).reshape(-1, gam.n)
    t = np.abs(np.broadcast_to(np.asarray(t, dtype=np.float64), x.shape[:1]))
    theta, w, _ = sphere_rule(gam, resolution)
    q = w.size
    shifts = t[:, None, None] * theta[None, :, :]
    xs = np.broadcast_to(x[:, None, :], shifts.shape)
    vals = translate_batch(f, gam, xs.reshape(-1, gam.n), shifts.reshape(-1, gam.n), n_nodes)
    out = vals.reshape(-1, q) @ w
    at_zero = t == 0
    if at_zero.any():
        # M_0 f = f exactly
        out[at_zero] = as_even(f, gam.n)(x[at_zero])
    return out


def spherical_mean(f, gam, x, t, resolution=DEFAULT_RESOLUTION, n_nodes=DEFAULT_SIZE):
    """Weighted spherical mean of f over the positive-orthant sphere of
    radius t about x. For n = 1 this is T^t f(x)."""
    gam = as_gamma(gam)
    x = np.asarray(x, dtype=np.float64)
    single = x.size == gam.n and np.ndim(t) == 0
    out = spherical_mean_batch(f, gam, x.reshape(-1, gam.n), np.ravel(t) if np.ndim(t) else t,
                               resolution, n_nodes)
    return float(out[0]) if single else out


def kgamma_constant(g, k):
    """2 Gamma((k+1)/2) / (Gamma((k-g)/2) Gamma((g+1)/2))."""
    return 2.0 * gamma_fn(0.5 * (k + 1.0)) / (gamma_fn(0.5 * (k - g)) * gamma_fn(0.5 * (g + 1.0)))


def translate_kgamma(f, g, k, x, t, rule=None, n_nodes=DEFAULT_SIZE):
    """The (k, gamma) translation
    C(g,k) int_0^1 (1-y^2)^((k-g-2)/2) [T^{ty} f(x)] y^g dy, for k > g > 0.

    ``rule`` defaults to ``jacobi_rule((k-g-2)/2, g, n_nodes)``.
    """
    g, k = float(g), float(k)
    if not k > g:
        raise DomainError(f"translate_kgamma requires k > gamma, got k={k:g}, gamma={g:g}")
    if g <= 0:
        raise DomainError(f"gamma must be positive, got {g:g}")
    alpha = 0.5 * (k - g - 2.0)
    if rule is None:
        rule = jacobi_rule(alpha, g, n_nodes)
    elif rule.kind != "jacobi" or rule.params != (alpha, g):
        raise UsageError(
            f"translate_kgamma needs jacobi_rule({alpha:g}, {g:g}, N), got {rule.kind}{rule.params}")
    scalar = np.ndim(x) == 0 and np.ndim(t) == 0
    xb, tb = np.broadcast_arrays(np.abs(np.asarray(x, dtype=np.float64)),
                                 np.abs(np.asarray(t, dtype=np.float64)))
    xs = np.repeat(xb.reshape(-1, 1), rule.size, axis=0)
    ys = (tb.reshape(-1, 1) * rule.nodes[None, :]).reshape(-1, 1)
    vals = translate_batch(f, (g,), xs, ys, n_nodes).reshape(-1, rule.size)
    out = (vals @ rule.weights / rule.total_weight).reshape(xb.shape)
    return float(out) if scalar else out
