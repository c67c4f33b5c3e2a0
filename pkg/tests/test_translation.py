import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate as sci_integrate
from scipy import special

from conftest import gaussian_datum, jbessel_datum
from epdkit.errors import DomainError, UsageError
from epdkit.quadrature import angular_rule, angular_weight_integral, jacobi_rule, jacobi_weight_integral
from epdkit.specfun import normalized_j
from epdkit.translation import (EvenFunction, MultiIndexGamma, kgamma_constant, sphere_measure,
                                sphere_rule, spherical_mean, spherical_mean_batch, translate_1d,
                                translate_kgamma, translate_nd, translation_constant)

G = 2 / 3


def jfun(g):
    nu = 0.5 * (g - 1)
    return EvenFunction(lambda p: normalized_j(nu, p[:, 0]))


def scipy_j(nu, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = special.gamma(nu + 1) * special.jv(nu, x) * (0.5 * x) ** -nu
    return np.where(x == 0, 1.0, out)


def test_multi_index_gamma():
    gam = MultiIndexGamma([0.5, 1.5])
    assert gam.n == 2 and gam.abs == 2.0
    assert MultiIndexGamma(0.25).entries == (0.25,)
    for bad in ([], [0.0], [1.0, -2.0], [float("inf")]):
        with pytest.raises(DomainError):
            MultiIndexGamma(bad)


def test_even_function_reflects_and_checks_dimension():
    f = EvenFunction(lambda p: p[:, 0] + 2 * p[:, 1], 2)
    assert f([[-1.0, -2.0]]) == f([[1.0, 2.0]])
    assert f(np.ones((3, 4, 2))).shape == (3, 4)
    with pytest.raises(UsageError):
        f(np.ones((5, 3)))


def test_even_function_accepts_pointwise_callable():
    f = EvenFunction(lambda p: float(p[0, 0]) ** 2)
    assert_allclose(f(np.array([-1.0, 2.0, 3.0])), [1.0, 4.0, 9.0])


@pytest.mark.parametrize("g", [0.3, G, 1.0, 2.5])
def test_translation_constant_is_reciprocal_measure(g):
    assert_allclose(translation_constant(g) * angular_weight_integral(g), 1.0, rtol=1e-14)


def test_translate_1d_examples():
    rule = angular_rule(G)
    f = EvenFunction(lambda p: np.exp(-p[:, 0] ** 2) * np.cos(p[:, 0]))
    assert translate_1d(f, G, 1.3, 0.0, rule) == f(1.3)
    one = EvenFunction(lambda p: np.ones(p.shape[0]))
    assert_allclose(translate_1d(one, G, 0.7, 1.9, rule), 1.0, rtol=1e-14)


@pytest.mark.parametrize("g", [G, 1.5, 3.0])
def test_product_formula(g):
    rule = angular_rule(g)
    nu = 0.5 * (g - 1)
    for x in np.linspace(0.0, 3.0, 7):
        for y in np.linspace(0.0, 3.0, 7):
            assert_allclose(translate_1d(jfun(g), g, x, y, rule),
                            normalized_j(nu, x) * normalized_j(nu, y), atol=1e-13)


def test_translate_1d_symmetry():
    rule = angular_rule(G)
    f = EvenFunction(lambda p: np.exp(-0.5 * p[:, 0] ** 2) * (1 + p[:, 0] ** 2))
    xs = np.linspace(0.1, 2.5, 10)
    for x in xs:
        for y in xs:
            a, b = translate_1d(f, G, x, y, rule), translate_1d(f, G, y, x, rule)
            assert abs(a - b) <= 1e-12 * abs(a)


def test_translate_1d_agrees_with_direct_quadrature():
    f = lambda r: np.exp(-r * r) * (2 + np.cos(3 * r))
    x, y = 0.8, 1.4
    oracle = translation_constant(G) * sci_integrate.quad(
        lambda a: f(math.sqrt(x * x + y * y - 2 * x * y * math.cos(a))) * math.sin(a) ** (G - 1),
        0, math.pi, limit=200, epsabs=1e-13)[0]
    got = translate_1d(EvenFunction(lambda p: f(p[:, 0])), G, x, y, angular_rule(G))
    assert_allclose(got, oracle, rtol=1e-10)


def test_translate_1d_rule_mismatch():
    with pytest.raises(UsageError):
        translate_1d(jfun(G), G, 1.0, 1.0, angular_rule(1.5))
    with pytest.raises(UsageError):
        translate_1d(jfun(G), G, 1.0, 1.0, jacobi_rule(0.0, G))


def test_translate_nd_examples():
    gam = (0.5, 1.5)
    f = jbessel_datum(gam).f
    x = np.array([0.4, 1.2])
    assert translate_nd(f, gam, x, np.zeros(2)) == f(x)
    y = np.array([[0.9, 0.3], [2.0, 1.1]])
    want = f(x) * f(y)
    assert_allclose(translate_nd(f, gam, x, y), want, atol=1e-13)
    one = EvenFunction(lambda p: np.ones(p.shape[0]), 2)
    assert_allclose(translate_nd(one, gam, x, y), [1.0, 1.0], rtol=1e-14)
    with pytest.raises(UsageError):
        translate_nd(f, gam, np.zeros(3), np.zeros(3))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_spherical_mean_normalization(n):
    rng = np.random.default_rng(n)
    one = lambda p: np.ones(p.shape[0])
    for _ in range(3):
        gam = tuple(rng.uniform(0.05, 3.0, n))
        x = rng.uniform(0, 2, n)
        got = spherical_mean(EvenFunction(one, n), gam, x, 1.3, resolution=8, n_nodes=12)
        assert abs(got - 1.0) <= 1e-12
        theta, w, raw = sphere_rule(gam, 12)
        assert_allclose(raw, sphere_measure(gam), rtol=1e-12)
        assert_allclose(np.sum(theta ** 2, axis=1), 1.0, rtol=1e-14)
        assert np.all(theta >= 0)


def test_spherical_mean_at_zero_radius():
    gam = (0.5, 1.5)
    f = gaussian_datum(gam).f
    x = np.array([[0.3, 0.9], [1.4, 0.0]])
    np.testing.assert_array_equal(spherical_mean_batch(f, gam, x, 0.0), f(x))


def test_spherical_mean_one_dimension_is_translation():
    f = EvenFunction(lambda p: np.exp(-p[:, 0] ** 2))
    assert_allclose(spherical_mean(f, (G,), [0.7], 1.1), translate_1d(f, G, 0.7, 1.1, angular_rule(G)),
                    rtol=1e-15)


def spherical_eigen_oracle(gam, t):
    """Independent quadrature of the mean of prod j(t theta_i) over the quarter circle."""
    (g1, g2) = gam
    integrand = lambda phi: (scipy_j(0.5 * (g1 - 1), t * math.cos(phi)) * math.cos(phi) ** g1
                             * scipy_j(0.5 * (g2 - 1), t * math.sin(phi)) * math.sin(phi) ** g2)
    total = sci_integrate.quad(lambda phi: math.cos(phi) ** g1 * math.sin(phi) ** g2, 0, math.pi / 2)[0]
    return sci_integrate.quad(integrand, 0, math.pi / 2, epsabs=1e-13, limit=200)[0] / total


def test_spherical_mean_of_bessel_product():
    gam = (0.5, 1.5)
    n, d = 2, 2 + 2.0
    f = jbessel_datum(gam).f
    x = np.array([0.6, 1.1])
    for t in (0.5, 1.0, 2.0):
        got = spherical_mean(f, gam, x, t)
        oracle = f(x) * spherical_eigen_oracle(gam, t)
        assert_allclose(got, oracle, rtol=1e-9)
        assert_allclose(got, f(x) * normalized_j(0.5 * d - 1, math.sqrt(n) * t), rtol=1e-10)


@pytest.mark.parametrize("name", ["gaussian", "jbessel", "polynomial"])
def test_transmutation_identity(name):
    gam = (0.5, 1.5)
    if name == "polynomial":
        # f = x1^4 + x1^2 x2^2: Delta f = 4(3+g1) x1^2 + 2(1+g1) x2^2 + 2(1+g2) x1^2
        f = EvenFunction(lambda p: p[:, 0] ** 4 + p[:, 0] ** 2 * p[:, 1] ** 2, 2)
        lap = EvenFunction(lambda p: (4 * (3 + gam[0]) + 2 * (1 + gam[1])) * p[:, 0] ** 2
                           + 2 * (1 + gam[0]) * p[:, 1] ** 2, 2)
    else:
        datum = gaussian_datum(gam) if name == "gaussian" else jbessel_datum(gam)
        f, lap = datum.f, datum.laplace_powers[0]
    axis = np.linspace(0.3, 1.5, 3)
    X1, X2, T = np.meshgrid(axis, axis, axis, indexing="ij")
    x = np.column_stack([X1.ravel(), X2.ravel()])
    t = T.ravel()
    k = 2 + sum(gam) - 1
    h = 1e-3
    mean = lambda func, tt: spherical_mean_batch(func, gam, x, tt)
    mp, m0, mm = mean(f, t + h), mean(f, t), mean(f, t - h)
    residual = (mp - 2 * m0 + mm) / h ** 2 + k / t * (mp - mm) / (2 * h) - mean(lap, t)
    assert np.max(np.abs(residual)) <= 1e-5


def test_spherical_mean_initial_slope():
    gam = (0.5, 1.5)
    f = gaussian_datum(gam).f
    x = np.array([[0.3, 0.9], [1.4, 0.2]])
    h = 1e-4
    slope = (spherical_mean_batch(f, gam, x, h) - spherical_mean_batch(f, gam, x, -h)) / (2 * h)
    assert np.max(np.abs(slope)) <= 1e-8


def test_kgamma_constant_is_reciprocal_weight():
    for g, k in ((G, 2.5), (1.5, 4.0), (0.3, 0.7)):
        assert_allclose(kgamma_constant(g, k) * jacobi_weight_integral(0.5 * (k - g - 2), g), 1.0, rtol=1e-13)


def test_translate_kgamma_examples():
    k = 2.5
    f = jfun(G)
    x = np.linspace(0.0, 2.0, 5)
    t = np.linspace(0.0, 2.0, 5)[:, None]
    got = translate_kgamma(f, G, k, x, t)
    assert_allclose(got, normalized_j(-1 / 6, x) * normalized_j(0.75, t), atol=1e-13)
    g2 = EvenFunction(lambda p: np.exp(-p[:, 0] ** 2))
    assert translate_kgamma(g2, G, k, 0.8, 0.0) == pytest.approx(g2(0.8), abs=1e-15)
    one = EvenFunction(lambda p: np.ones(p.shape[0]))
    assert_allclose(translate_kgamma(one, G, k, 0.8, 1.7), 1.0, rtol=1e-14)


def test_translate_kgamma_errors():
    f = jfun(G)
    with pytest.raises(DomainError):
        translate_kgamma(f, G, 0.5, 1.0, 1.0)
    with pytest.raises(UsageError):
        translate_kgamma(f, G, 2.5, 1.0, 1.0, rule=jacobi_rule(0.0, G))
