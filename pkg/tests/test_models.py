# coding: utf-8
from __future__ import with_statement, print_function, absolute_import

import sys
from os.path import dirname, join
sys.path.insert(0, join(dirname(__file__), ".."))

import numpy as np
import pytest

from gaussmix_filter.models import (
    PROBE, TEST_FUNCTION_NAMES, bounded_sine, constant, generator_apply, generator_function,
    linear_ou, make_builtin_model, make_test_function, monomial, sensor_product, sine)


def _finite_difference(fn, x, h=1e-5):
    return (fn(x + h) - fn(x - h)) / (2 * h)


def _central_difference(fn, x, h=1e-3):
    # fourth order
    return (-fn(x + 2 * h) + 8 * fn(x + h) - 8 * fn(x - h) + fn(x - 2 * h)) / (12 * h)


def test_catalog():
    assert TEST_FUNCTION_NAMES == ("gauss", "one", "sin", "tanh", "x", "x2")
    for name in TEST_FUNCTION_NAMES:
        phi = make_test_function(name)
        assert phi.name == name
        assert phi.order >= 2
        assert np.all(np.isfinite(phi(PROBE)))
    with pytest.raises(ValueError, match="unknown test function"):
        make_test_function("cubic")


def test_derivatives_match_finite_differences():
    for name in ["sin", "tanh", "gauss", "x2"]:
        phi = make_test_function(name)
        for k in range(phi.order):
            approx = _finite_difference(lambda x: phi.derivative(k, x), PROBE)
            assert np.allclose(phi.derivative(k + 1, PROBE), approx, atol=1e-6), (name, k)


def test_model_coefficient_derivatives():
    for model in [linear_ou(theta=1.5, sigma0=0.8, gamma=2.0), bounded_sine()]:
        for coef in [model.drift, model.diffusion, model.sensor]:
            for k in range(coef.order):
                exact = coef.derivative(k + 1, PROBE)
                approx = _central_difference(lambda x: coef.derivative(k, x), PROBE)
                assert np.all(np.abs(approx - exact) <= 1e-5 * (1 + np.abs(exact))), \
                    (model.name, coef.name, k)


def test_bounded_sine_diffusion():
    sigma = bounded_sine().diffusion
    assert np.allclose(sigma(PROBE), 1 + 0.5 * np.cos(PROBE))
    assert np.allclose(sigma.derivative(1, PROBE), -0.5 * np.sin(PROBE))
    assert np.allclose(sigma.derivative(2, PROBE), -0.5 * np.cos(PROBE))


def test_derivative_beyond_order():
    phi = make_test_function("x")
    with pytest.raises(ValueError):
        phi.derivative(phi.order + 1, 0.0)


def test_monomial():
    assert monomial(1).name == "x"
    assert monomial(3).name == "x3"
    assert monomial(3).degree == 3
    assert np.allclose(monomial(3).derivative(2, PROBE), 6 * PROBE)
    assert np.allclose(monomial(3).derivative(4, PROBE), 0.0)


def test_product_rule():
    f = monomial(1) * sine()
    x = PROBE
    assert np.allclose(f(x), x * np.sin(x))
    assert np.allclose(f.derivative(1, x), np.sin(x) + x * np.cos(x))
    assert np.allclose(f.derivative(2, x), 2 * np.cos(x) - x * np.sin(x))
    assert f.degree is None


def test_scalar_algebra():
    f = (constant(1.0) + monomial(2) * 3.0)
    assert np.allclose(f(PROBE), 1 + 3 * PROBE ** 2)
    assert np.allclose(f.derivative(1, PROBE), 6 * PROBE)
    assert f.degree == 2
    g = 2.0 * monomial(1)
    assert np.allclose(g(PROBE), 2 * PROBE)


def test_linear_generator():
    theta, sigma0 = 0.7, 1.3
    model = linear_ou(theta=theta, sigma0=sigma0)
    a_x2 = generator_function(model, make_test_function("x2"))
    assert a_x2.name == "A[x2]"
    assert np.allclose(a_x2(PROBE), -2 * theta * PROBE ** 2 + sigma0 ** 2)
    assert np.allclose(a_x2.derivative(1, PROBE), -4 * theta * PROBE)
    assert np.allclose(generator_function(model, make_test_function("one"))(PROBE), 0.0)
    assert np.allclose(generator_apply(model, make_test_function("x2"), PROBE),
                       a_x2(PROBE))


def test_generator_is_linear():
    a, b = 1.7, -0.6
    for model in [linear_ou(), bounded_sine()]:
        for n1, n2 in [("sin", "gauss"), ("tanh", "x2")]:
            phi1, phi2 = make_test_function(n1), make_test_function(n2)
            combined = generator_function(model, phi1.scaled(a) + phi2.scaled(b))
            separate = a * generator_function(model, phi1)(PROBE) + \
                b * generator_function(model, phi2)(PROBE)
            assert np.allclose(combined(PROBE), separate, rtol=1e-12, atol=1e-12)
            pointwise = a * generator_apply(model, phi1, PROBE) + \
                b * generator_apply(model, phi2, PROBE)
            assert np.allclose(combined(PROBE), pointwise, rtol=1e-12, atol=1e-12)


def test_nonlinear_generator_matches_pointwise_formula():
    model = bounded_sine()
    for name in ["sin", "tanh", "gauss"]:
        phi = make_test_function(name)
        assert np.allclose(generator_function(model, phi)(PROBE),
                           generator_apply(model, phi, PROBE))


def test_sensor_product():
    model = linear_ou(gamma=2.0)
    h_x = sensor_product(model, make_test_function("x"))
    assert h_x.name == "h*x"
    assert np.allclose(h_x(PROBE), 2.0 * PROBE ** 2)


def test_builtin_models():
    model = make_builtin_model("bounded_sine")
    assert not model.is_linear
    assert np.all(np.abs(model.sensor(PROBE)) <= model.sensor_bound)
    assert np.all(model.diffusion(PROBE) <= model.diffusion_bound)
    assert np.all(model.diffusion(PROBE) >= 0.5)

    model = make_builtin_model("linear_ou", gamma=0.0)
    assert model.is_linear
    assert model.linear == (1.0, 1.0, 0.0)
    assert np.allclose(model.sensor(PROBE), 0.0)
    assert model.diffusion_bound == 1.0

    with pytest.raises(ValueError, match="unknown model"):
        make_builtin_model("van_der_pol")


def test_model_params_are_plain():
    params = linear_ou(theta=2.0).params()
    assert params["name"] == "linear_ou"
    assert params["linear"] == [2.0, 1.0, 1.0]
    assert bounded_sine().params()["linear"] is None
