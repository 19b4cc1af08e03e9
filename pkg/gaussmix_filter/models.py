# coding: utf-8
"""Filtering models, smooth test functions and the signal generator.

Every coefficient and test function carries hand-coded derivatives up to a
declared order. Sums and products of such functions assemble their
derivatives by the Leibniz rule, which is how A(phi) and h*phi are built
without finite differences.
"""
from math import comb

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.hermite_e import HermiteE

# Probe interval for the model and test-function invariants
PROBE = np.round(np.arange(-5.0, 5.0 + 1e-9, 0.1), 10)

MAX_ORDER = 6


class SmoothFunction(object):
    """Scalar function with derivatives through a fixed order.

    Args:
        name (str): Identifier used in reports and trajectory columns.
        derivs (list): ``derivs[k]`` evaluates the k-th derivative; entry 0 is
            the function itself. All entries are numpy-vectorised.
        degree (int): Polynomial degree, or None for non-polynomials.
    """

    def __init__(self, name, derivs, degree=None):
        self.name = name
        self._derivs = tuple(derivs)
        self.degree = degree

    @property
    def order(self):
        return len(self._derivs) - 1

    @property
    def is_polynomial(self):
        return self.degree is not None

    @property
    def derivatives(self):
        """Derivative functions of orders 1..order."""
        return self._derivs[1:]

    def __call__(self, x):
        return self._derivs[0](x)

    def derivative(self, k, x):
        if k > self.order:
            raise ValueError("{} has derivatives to order {} only, asked {}".format(
                self.name, self.order, k))
        return self._derivs[k](x)

    def shift(self, name=None):
        """The first derivative as a smooth function of one order less."""
        if self.order < 1:
            raise ValueError("{} has no derivative".format(self.name))
        degree = None if self.degree is None else max(self.degree - 1, 0)
        return SmoothFunction(name or "d[{}]".format(self.name),
                              self._derivs[1:], degree)

    def scaled(self, c, name=None):
        c = float(c)
        derivs = [_scale(d, c) for d in self._derivs]
        degree = 0 if c == 0.0 else self.degree
        return SmoothFunction(name or "{}*{}".format(_fmt(c), self.name),
                              derivs, degree)

    def __add__(self, other):
        order = min(self.order, other.order)
        derivs = [_add(self._derivs[k], other._derivs[k]) for k in range(order + 1)]
        return SmoothFunction("({}+{})".format(self.name, other.name), derivs,
                              _max_degree(self.degree, other.degree))

    def __mul__(self, other):
        if not isinstance(other, SmoothFunction):
            return self.scaled(other)
        order = min(self.order, other.order)
        derivs = [_leibniz(self._derivs, other._derivs, k) for k in range(order + 1)]
        degree = None
        if self.degree is not None and other.degree is not None:
            degree = self.degree + other.degree
        return SmoothFunction("{}*{}".format(self.name, other.name), derivs, degree)

    __rmul__ = __mul__

    def renamed(self, name):
        return SmoothFunction(name, self._derivs, self.degree)

    def __repr__(self):
        return "SmoothFunction({}, order={})".format(self.name, self.order)


# Test functions are the smooth functions of the catalog below
TestFunction = SmoothFunction


def _fmt(c):
    return "{:g}".format(c)


def _scale(fn, c):
    return lambda x: c * fn(x)


def _add(f, g):
    return lambda x: f(x) + g(x)


def _leibniz(fs, gs, k):
    terms = [(comb(k, i), fs[i], gs[k - i]) for i in range(k + 1)]

    def fn(x):
        return sum(c * f(x) * g(x) for c, f, g in terms)
    return fn


def _max_degree(a, b):
    if a is None or b is None:
        return None
    return max(a, b)


def constant(c, name=None, order=MAX_ORDER):
    c = float(c)

    def value(x):
        return np.full_like(np.asarray(x, dtype=np.float64), c)

    def zero(x):
        return np.zeros_like(np.asarray(x, dtype=np.float64))
    return SmoothFunction(name or _fmt(c), [value] + [zero] * order, 0)


def polynomial(coefs, name, order=MAX_ORDER):
    """Polynomial with coefficients in increasing degree."""
    p = Polynomial(coefs)
    derivs = [p.deriv(k) if k else p for k in range(order + 1)]
    return SmoothFunction(name, [_as_float(d) for d in derivs], p.degree())


def monomial(k):
    coefs = [0.0] * k + [1.0]
    return polynomial(coefs, "x" if k == 1 else "x{}".format(k))


def _as_float(p):
    return lambda x: p(np.asarray(x, dtype=np.float64))


def _cyclic(funcs, name, order=MAX_ORDER, start=0):
    """Functions whose derivatives cycle through ``funcs``."""
    derivs = [funcs[(start + k) % len(funcs)] for k in range(order + 1)]
    return SmoothFunction(name, derivs)


def sine(name="sin"):
    return _cyclic([np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)], name)


def cosine(name="cos"):
    return _cyclic([np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)],
                   name, start=1)


def hyperbolic_tangent(name="tanh", order=MAX_ORDER):
    # d/dx P(tanh x) = P'(t) (1 - t^2) with t = tanh x
    one_minus_t2 = Polynomial([1.0, 0.0, -1.0])
    polys = [Polynomial([0.0, 1.0])]
    for _ in range(order):
        polys.append(polys[-1].deriv() * one_minus_t2)
    derivs = [_in_tanh(p) for p in polys]
    return SmoothFunction(name, derivs)


def _in_tanh(p):
    return lambda x: p(np.tanh(np.asarray(x, dtype=np.float64)))


def gaussian_bump(name="gauss", order=MAX_ORDER):
    # d^k/dx^k exp(-x^2/2) = (-1)^k He_k(x) exp(-x^2/2)
    derivs = [_hermite_bump(k) for k in range(order + 1)]
    return SmoothFunction(name, derivs)


def _hermite_bump(k):
    he = HermiteE.basis(k)
    sign = -1.0 if k % 2 else 1.0

    def fn(x):
        x = np.asarray(x, dtype=np.float64)
        return sign * he(x) * np.exp(-0.5 * x * x)
    return fn


_TEST_FUNCTIONS = {
    "one": lambda: constant(1.0, name="one"),
    "x": lambda: monomial(1),
    "x2": lambda: monomial(2),
    "sin": sine,
    "tanh": hyperbolic_tangent,
    "gauss": gaussian_bump,
}

TEST_FUNCTION_NAMES = tuple(sorted(_TEST_FUNCTIONS))


def make_test_function(name):
    """Test function from the fixed catalog (one, x, x2, sin, tanh, gauss)."""
    try:
        return _TEST_FUNCTIONS[name]()
    except KeyError:
        raise ValueError("unknown test function: {}".format(name))


class Model(object):
    """One-dimensional filtering model.

    Signal ``dX = f(X)dt + sigma(X)dV``, observation ``dY = h(X)dt + dW`` and
    initial law ``N(initial_mean, initial_stddev^2)``.

    ``linear`` holds ``(theta, sigma0, gamma)`` when the model is the linear
    Ornstein-Uhlenbeck instance with an exact Kalman-Bucy posterior.
    """

    def __init__(self, name, drift, diffusion, sensor, initial_mean=0.0,
                 initial_stddev=1.0, sensor_bound=np.inf, diffusion_bound=None,
                 linear=None):
        if initial_stddev < 0:
            raise ValueError("initial_stddev must be >= 0, got {}".format(initial_stddev))
        self.name = name
        self.drift = drift
        self.diffusion = diffusion
        self.sensor = sensor
        self.initial_mean = float(initial_mean)
        self.initial_stddev = float(initial_stddev)
        self.sensor_bound = sensor_bound
        if diffusion_bound is None:
            diffusion_bound = float(np.max(np.abs(diffusion(PROBE))))
        self.diffusion_bound = diffusion_bound
        self.linear = linear

    @property
    def is_linear(self):
        return self.linear is not None

    def params(self):
        """Plain parameters identifying the model, for hashing and manifests."""
        return {"name": self.name,
                "initial_mean": self.initial_mean,
                "initial_stddev": self.initial_stddev,
                "linear": None if self.linear is None else list(self.linear)}

    def validate(self, xs=PROBE):
        h = np.abs(self.sensor(xs))
        if np.any(h > self.sensor_bound):
            raise ValueError("{}: sensor exceeds its declared bound {}".format(
                self.name, self.sensor_bound))
        if np.any(self.diffusion(xs) < 0):
            raise ValueError("{}: negative diffusion on the probe grid".format(self.name))
        return self

    def __repr__(self):
        return "Model({})".format(self.name)


def linear_ou(theta=1.0, sigma0=1.0, gamma=1.0, initial_mean=0.0, initial_stddev=1.0):
    # f and h are unbounded here; kept for the exact Kalman-Bucy posterior
    return Model("linear_ou",
                 drift=polynomial([0.0, -theta], "f"),
                 diffusion=constant(sigma0, name="sigma"),
                 sensor=polynomial([0.0, gamma], "h"),
                 initial_mean=initial_mean,
                 initial_stddev=initial_stddev,
                 diffusion_bound=abs(sigma0),
                 linear=(float(theta), float(sigma0), float(gamma)))


def bounded_sine(initial_mean=0.0, initial_stddev=1.0):
    diffusion = (constant(1.0) + cosine() * 0.5).renamed("sigma")
    return Model("bounded_sine",
                 drift=sine("f"),
                 diffusion=diffusion,
                 sensor=hyperbolic_tangent("h"),
                 initial_mean=initial_mean,
                 initial_stddev=initial_stddev,
                 sensor_bound=1.0,
                 diffusion_bound=1.5)


_BUILTIN_MODELS = {
    "linear_ou": linear_ou,
    "bounded_sine": bounded_sine,
}

MODEL_NAMES = tuple(sorted(_BUILTIN_MODELS))


def make_builtin_model(name, **params):
    """Built-in model by name.

    Args:
        name (str): ``linear_ou`` or ``bounded_sine``.
        params: Keyword overrides passed to the model builder, e.g. ``gamma=0``.

    Raises:
        ValueError: ``unknown model`` for any other name.
    """
    try:
        builder = _BUILTIN_MODELS[name]
    except KeyError:
        raise ValueError("unknown model: {}".format(name))
    return builder(**params).validate()


def generator_apply(model, phi, x):
    """A(phi)(x) = f(x) phi'(x) + 1/2 sigma(x)^2 phi''(x)."""
    s = model.diffusion(x)
    return model.drift(x) * phi.derivative(1, x) + 0.5 * s * s * phi.derivative(2, x)


def generator_function(model, phi):
    """A(phi) as a smooth function, derivatives assembled by the Leibniz rule."""
    d1 = phi.shift()
    d2 = d1.shift()
    a = (model.diffusion * model.diffusion) * 0.5
    return (model.drift * d1 + a * d2).renamed("A[{}]".format(phi.name))


def sensor_product(model, phi):
    """h * phi as a smooth function."""
    return (model.sensor * phi).renamed("h*{}".format(phi.name))
