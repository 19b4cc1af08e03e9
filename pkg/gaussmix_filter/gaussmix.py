# coding: utf-8
"""Gaussian and Gaussian-mixture expectations of test functions."""
import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.special import logsumexp

# Probabilists' Gauss-Hermite rule: exact for polynomials of degree <= 39
QUADRATURE_NODES = 20
_z, _w = hermegauss(QUADRATURE_NODES)
_NODES = _z
_WEIGHTS = _w / np.sqrt(2.0 * np.pi)


class GaussianMeasure(object):
    """N(mean, variance); variance 0 is the Dirac mass at ``mean``."""

    def __init__(self, mean, variance):
        if variance < 0:
            raise ValueError("negative variance: {}".format(variance))
        self.mean = float(mean)
        self.variance = float(variance)

    def __repr__(self):
        return "GaussianMeasure({}, {})".format(self.mean, self.variance)


class WeightedMixture(object):
    """Convex combination of Gaussian measures.

    Args:
        weights: Normalised weights, non-negative and summing to 1 (1e-12).
        means, variances: Component parameters, same length as ``weights``.
    """

    def __init__(self, weights, means, variances):
        weights = np.asarray(weights, dtype=np.float64)
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("mixture weights must be >= 0 and sum to 1")
        self.weights = weights
        self.means = np.asarray(means, dtype=np.float64)
        self.variances = np.asarray(variances, dtype=np.float64)
        assert self.means.shape == weights.shape == self.variances.shape

    @classmethod
    def from_log_weights(cls, log_weights, means, variances):
        log_weights = np.asarray(log_weights, dtype=np.float64)
        weights = np.exp(log_weights - logsumexp(log_weights))
        # renormalise once more so the sum is 1 to rounding
        return cls(weights / weights.sum(), means, variances)

    @property
    def components(self):
        return [(a, GaussianMeasure(v, w))
                for a, v, w in zip(self.weights, self.means, self.variances)]

    def __len__(self):
        return len(self.weights)


def gauss_expect_many(means, variances, phi):
    """E[phi(v + sqrt(w) Z)] for arrays of means ``v`` and variances ``w``.

    Dirac components (``w == 0``) are evaluated as ``phi(v)`` exactly.
    """
    means = np.asarray(means, dtype=np.float64)
    variances = np.asarray(variances, dtype=np.float64)
    if np.any(variances < 0):
        raise ValueError("negative variance")
    dirac = variances == 0
    if np.all(dirac):
        return np.asarray(phi(means), dtype=np.float64)
    sd = np.sqrt(variances)
    # (..., K) nodes per component
    x = means[..., None] + sd[..., None] * _NODES
    out = np.asarray(phi(x) @ _WEIGHTS, dtype=np.float64)
    if np.any(dirac):
        out = np.where(dirac, phi(means), out)
    return out


def gauss_expect(m, phi):
    """E[phi(X)] for X ~ m, by 20-node Gauss-Hermite quadrature."""
    if m.variance < 0:
        raise ValueError("negative variance")
    if m.variance == 0:
        return float(phi(m.mean))
    return float(gauss_expect_many(m.mean, m.variance, phi))


def mixture_expect(mix, phi):
    return float(mix.weights @ gauss_expect_many(mix.means, mix.variances, phi))


def point_mass_expect(mix, phi):
    """Variance-stripped evaluation: sum_j a_j phi(v_j)."""
    return float(mix.weights @ np.asarray(phi(mix.means), dtype=np.float64))
