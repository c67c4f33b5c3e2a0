"""Gaussian rules for the weights that appear in the solution integrals.

Two families:

* ``jacobi_rule(alpha, beta, n)`` on [0, 1] for the weight
  ``(1 - y**2)**alpha * y**beta``. Used for the radial factor of the ball
  integral and for each polar angle of the positive-orthant sphere.
* ``angular_rule(gamma, n)`` on [0, pi] for ``sin(a)**(gamma - 1)``, the
  measure of the one-dimensional generalized translation.

Rules are immutable and cached.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, EvaluationError
from .specfun import gamma

DEFAULT_SIZE = 64


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights of a Gaussian rule.

    ``kind`` is ``"jacobi"`` (params ``(alpha, beta)``, interval [0, 1]) or
    ``"angular"`` (params ``(gamma,)``, interval [0, pi]). Angular rules also
    carry ``cos_nodes`` so the translation kernel never recomputes cosines.
    """

    kind: str
    params: tuple
    nodes: np.ndarray
    weights: np.ndarray
    cos_nodes: np.ndarray = None

    @property
    def size(self):
        return self.nodes.shape[0]

    @property
    def total_weight(self):
        return float(self.weights.sum())


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def gauss_jacobi(a, b, n):
    """Golub-Welsch rule on [-1, 1] for the weight (1-s)**a (1+s)**b."""
    if a <= -1 or b <= -1:
        raise DomainError(f"Jacobi exponents must exceed -1, got a={a:g}, b={b:g}")
    k = np.arange(n, dtype=np.float64)
    ab = a + b
    diag = np.empty(n)
    diag[0] = (b - a) / (ab + 2.0)
    kk = k[1:]
    diag[1:] = (b * b - a * a) / ((2 * kk + ab) * (2 * kk + ab + 2.0))
    off = np.empty(max(n - 1, 0))
    if n > 1:
        off[0] = math.sqrt(4.0 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab)))
        kk = k[2:]
        off[1:] = np.sqrt(
            4.0 * kk * (kk + a) * (kk + b) * (kk + ab)
            / ((2 * kk + ab) ** 2 * (2 * kk + ab + 1.0) * (2 * kk + ab - 1.0))
        )
    mu0 = 2.0 ** (ab + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(ab + 2.0)
    if n == 1:
        return diag.copy(), np.array([mu0])
    nodes, vecs = eigh_tridiagonal(diag, off)
    weights = mu0 * vecs[0, :] ** 2
    return nodes, weights


def _lanczos(x, w, n):
    """Recurrence coefficients of the discrete measure sum_i w_i delta(x_i),
    by Lanczos with full reorthogonalisation."""
    m = x.shape[0]
    q = np.zeros((n + 1, m))
    q[0] = np.sqrt(w / w.sum())
    alpha = np.zeros(n)
    beta = np.zeros(max(n - 1, 0))
    for j in range(n):
        v = x * q[j]
        alpha[j] = np.dot(q[j], v)
        v -= alpha[j] * q[j]
        if j > 0:
            v -= beta[j - 1] * q[j - 1]
        for _ in range(2):
            v -= q[: j + 1].T @ (q[: j + 1] @ v)
        if j < n - 1:
            beta[j] = np.linalg.norm(v)
            q[j + 1] = v / beta[j]
    return alpha, beta


@lru_cache(maxsize=256)
def _jacobi_rule_cached(alpha, beta, n):
    # y = (1+s)/2 turns (1-y^2)^a y^b dy into (1-s)^a (1+s)^b times the
    # smooth factor ((3+s)/2)^a; discretise with an oversampled Jacobi rule
    # and re-orthogonalise in y.
    s, ws = gauss_jacobi(alpha, beta, n + 40)
    y = 0.5 * (1.0 + s)
    w = ws * 2.0 ** (-alpha - beta - 1.0) * (0.5 * (3.0 + s)) ** alpha
    if n == 1:
        a = np.array([np.dot(w, y) / w.sum()])
        return QuadratureRule("jacobi", (alpha, beta), _frozen(a), _frozen([w.sum()]))
    a, b = _lanczos(y, w, n)
    nodes, vecs = eigh_tridiagonal(a, b)
    weights = w.sum() * vecs[0, :] ** 2
    return QuadratureRule("jacobi", (alpha, beta), _frozen(nodes), _frozen(weights))


def jacobi_rule(alpha, beta, n=DEFAULT_SIZE):
    """Gauss rule for int_0^1 p(y) (1 - y**2)**alpha y**beta dy.

    Exact for polynomials p of degree <= 2n - 1.
    """
    alpha, beta, n = float(alpha), float(beta), int(n)
    if alpha <= -1.0:
        raise DomainError(f"alpha must exceed -1 for (1-y^2)^alpha to be integrable, got {alpha:g}")
    if beta <= -1.0:
        raise DomainError(f"beta must exceed -1 for y^beta to be integrable, got {beta:g}")
    if n < 1:
        raise DomainError(f"rule size must be positive, got {n}")
    return _jacobi_rule_cached(alpha, beta, n)


def jacobi_weight_integral(alpha, beta):
    """int_0^1 (1-y^2)^alpha y^beta dy = B((beta+1)/2, alpha+1) / 2."""
    return 0.5 * gamma(0.5 * (beta + 1)) * gamma(alpha + 1) / gamma(0.5 * (beta + 1) + alpha + 1)


@lru_cache(maxsize=256)
def _angular_rule_cached(g, n):
    # c = cos(a): sin^{g-1}(a) da = (1 - c^2)^{(g-2)/2} dc
    e = 0.5 * (g - 2.0)
    c, w = gauss_jacobi(e, e, n)
    order = np.argsort(-c)
    c, w = c[order], w[order]
    return QuadratureRule("angular", (g,), _frozen(np.arccos(np.clip(c, -1.0, 1.0))), _frozen(w), _frozen(c))


def angular_rule(g, n=DEFAULT_SIZE):
    """Gauss rule for int_0^pi p(a) sin(a)**(g - 1) da, exact for
    polynomials in cos(a) of degree <= 2n - 1."""
    g, n = float(g), int(n)
    if g <= 0:
        raise DomainError(f"angular weight exponent requires gamma > 0, got {g:g}")
    if n < 1:
        raise DomainError(f"rule size must be positive, got {n}")
    return _angular_rule_cached(g, n)


def angular_weight_integral(g):
    """int_0^pi sin(a)^(g-1) da = sqrt(pi) Gamma(g/2) / Gamma((g+1)/2)."""
    return math.sqrt(math.pi) * gamma(0.5 * g) / gamma(0.5 * (g + 1.0))


def integrate(rule, integrand):
    """Apply ``rule`` to a callable; vectorised calls are tried first."""
    nodes = rule.nodes
    try:
        values = np.asarray(integrand(nodes), dtype=np.float64)
        if values.shape != nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        values = np.array([float(integrand(float(y))) for y in nodes])
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        raise EvaluationError(
            f"integrand is not finite at node {i} (y={nodes[i]:.17g})", node_index=i
        )
    return float(np.dot(rule.weights, values))
