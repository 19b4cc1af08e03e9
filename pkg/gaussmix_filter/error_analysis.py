# coding: utf-8
"""Recalibrated errors, the discrete Zakai defect and the variance gap."""
from collections import namedtuple

import numpy as np

from gaussmix_filter.gaussmix import mixture_expect, point_mass_expect
from gaussmix_filter.models import generator_function, sensor_product

RescaledError = namedtuple(
    "RescaledError", ["n", "epsilon", "phi", "t", "value", "normalized_value"])


def rescaled_error(n, epsilon, rho_n, rho_ref):
    """n^epsilon (rho_n - rho_ref); works on scalars and arrays alike."""
    return float(n) ** epsilon * (np.asarray(rho_n) - np.asarray(rho_ref))


def normalized_rescaled_error(n, epsilon, pi_n, pi_ref):
    """n^epsilon (pi_n - pi_ref), the error of the normalised approximation."""
    return rescaled_error(n, epsilon, pi_n, pi_ref)


def point_mass_rescaled_error(n, epsilon, traj, name, rho_ref, index=-1):
    """Recalibrated error of the variance-stripped estimate xi sum a_j phi(v_j)."""
    return float(rescaled_error(n, epsilon, traj.rho_point(name)[index], rho_ref))


def error_record(n, epsilon, traj, name, rho_ref, pi_ref, index=-1):
    """RescaledError of a filter trajectory at one recorded index (T by default)."""
    value = rescaled_error(n, epsilon, traj.rho(name)[index], rho_ref)
    normalized = normalized_rescaled_error(n, epsilon, traj.pi(name)[index], pi_ref)
    return RescaledError(n, epsilon, name, float(traj.times[index]),
                         float(value), float(normalized))


def kallianpur_striebel_gap(traj, ref, name):
    """Largest deviation from the identity

        pi^n - pi = (rho^n(phi) - rho(phi)) / rho(1) - pi^n (rho^n(1) - rho(1)) / rho(1)

    over the times recorded in both trajectories.
    """
    idx = [ref.index_of(s) for s in traj.steps]
    rho1 = ref.rho_one[idx]
    pi_n = traj.pi(name)
    lhs = pi_n - ref.pi(name)[idx]
    rhs = (traj.rho(name) - ref.rho(name)[idx]) / rho1 - \
        pi_n * (traj.rho_one - rho1) / rho1
    return float(np.max(np.abs(lhs - rhs)))


def zakai_functionals(model, phi):
    """[phi, A(phi), h*phi]: what a trajectory must record for the Zakai defect."""
    return [phi, generator_function(model, phi), sensor_product(model, phi)]


def zakai_defect(traj, phi, model, obs):
    """Discrete Zakai defect at every grid time.

        D_k = rho_k(phi) - rho_0(phi) - sum_{s<k} rho_s(A phi) dt
              - sum_{s<k} rho_s(h phi) dY_s

    Sums are left-point (Ito).

    Raises:
        ValueError: If the trajectory is not recorded at every grid time or
            misses one of the functionals of :func:`zakai_functionals`.
    """
    if not traj.complete:
        raise ValueError("zakai residual needs a trajectory recorded at every grid time")
    if not traj.grid.matches(obs.grid):
        raise ValueError("grid mismatch: trajectory {} vs observation {}".format(
            traj.grid, obs.grid))
    _, a_phi, h_phi = zakai_functionals(model, phi)
    rho = traj.rho(phi.name)
    rho_a = traj.rho(a_phi.name)
    rho_h = traj.rho(h_phi.name)
    increments = rho_a[:-1] * obs.grid.dt + rho_h[:-1] * obs.increments
    integral = np.concatenate([[0.0], np.cumsum(increments)])
    return rho - rho[0] - integral


def zakai_residual(traj, phi, model, obs):
    """max_t |D_t| of :func:`zakai_defect`."""
    return float(np.max(np.abs(zakai_defect(traj, phi, model, obs))))


def variance_contribution_gap(state, phi):
    """|pi^n(phi) - sum_j a_j phi(v_j)|: what the Gaussian variances add."""
    mix = state.mixture()
    return abs(mixture_expect(mix, phi) - point_mass_expect(mix, phi))


def variance_gap_bound(cfg, model, phi_second_sup):
    """Taylor bound 1/2 |phi''|_inf alpha (beta + |sigma|_inf^2 delta)."""
    _, hi = cfg.variance_band(model)
    return 0.5 * phi_second_sup * hi
