# coding: utf-8
"""Reference solutions: exact Kalman-Bucy moments for the linear model and a
large-N bootstrap particle filter for everything else."""
import hashlib
import json
import os
from os.path import exists, join

import numpy as np

from gaussmix_filter.filter_core import FilterConfig, FilterTrajectory, run_filter
from gaussmix_filter.gaussmix import gauss_expect_many

_CSV_FMT = "%.17g"


class MomentPath(object):
    """Posterior mean ``m``, variance ``P`` and ``log rho_t(1)`` on a grid."""

    def __init__(self, grid, mean, variance, log_rho1):
        self.grid = grid
        self.mean = mean
        self.variance = variance
        self.log_rho1 = log_rho1

    def rho_one(self):
        return np.exp(self.log_rho1)

    def to_csv(self, path):
        data = np.column_stack([self.grid.times, self.mean, self.variance, self.log_rho1])
        np.savetxt(path, data, fmt=_CSV_FMT, delimiter=",", header="t,m,P,log_rho1",
                   comments="")


def riccati_fixed_point(theta, sigma0, gamma):
    """Stationary P of dP/dt = -2 theta P + sigma0^2 - gamma^2 P^2."""
    if gamma == 0:
        return sigma0 ** 2 / (2.0 * theta)
    g2 = gamma * gamma
    return (-theta + np.sqrt(theta * theta + g2 * sigma0 * sigma0)) / g2


def kalman_bucy(model, obs):
    """Euler-discretised Kalman-Bucy filter on the observation grid.

        dm = -theta m dt + gamma P (dY - gamma m dt)
        dP = (-2 theta P + sigma0^2 - gamma^2 P^2) dt
        d log rho(1) = gamma m dY - gamma^2 m^2 dt / 2

    Raises:
        ValueError: ``oracle requires linear model`` for nonlinear models.
    """
    if not model.is_linear:
        raise ValueError("oracle requires linear model, got {}".format(model.name))
    theta, sigma0, gamma = model.linear
    grid = obs.grid
    dt = grid.dt
    steps = grid.steps
    m = np.empty(steps + 1)
    P = np.empty(steps + 1)
    log_rho1 = np.empty(steps + 1)
    m[0] = model.initial_mean
    P[0] = model.initial_stddev ** 2
    log_rho1[0] = 0.0
    for k, dy in enumerate(obs.increments):
        mk, pk = m[k], P[k]
        log_rho1[k + 1] = log_rho1[k] + gamma * mk * dy - 0.5 * gamma * gamma * mk * mk * dt
        m[k + 1] = mk - theta * mk * dt + gamma * pk * (dy - gamma * mk * dt)
        P[k + 1] = pk + (-2.0 * theta * pk + sigma0 * sigma0 - gamma * gamma * pk * pk) * dt
    return MomentPath(grid, m, P, log_rho1)


def rho_reference(model, obs, phi, moments=None):
    """rho_t(phi) = rho_t(1) pi_t(phi) with Gaussian pi_t = N(m_t, P_t)."""
    if moments is None:
        moments = kalman_bucy(model, obs)
    return moments.rho_one() * gauss_expect_many(moments.mean, moments.variance, phi)


def reference_trajectory(model, obs, phi_list, moments=None):
    """The exact rho as a fully recorded trajectory."""
    if moments is None:
        moments = kalman_bucy(model, obs)
    grid = obs.grid
    traj = FilterTrajectory(grid, range(grid.steps + 1), [phi.name for phi in phi_list])
    traj.set_series(moments.rho_one(), {
        phi.name: gauss_expect_many(moments.mean, moments.variance, phi)
        for phi in phi_list})
    return traj


class OracleEstimate(object):
    """Per-time rho(phi) and pi(phi) with terminal standard errors.

    ``stderr`` holds the error of pi_T(phi), ``rho_stderr`` that of
    rho_T(phi); both come from the spread across independent sub-filters.
    """

    def __init__(self, grid, rho_one, rho, pi, stderr, n_particles, seed=None,
                 rho_stderr=None, batches=1):
        self.grid = grid
        self.rho_one = rho_one
        self.rho = rho
        self.pi = pi
        self.stderr = stderr
        self.rho_stderr = rho_stderr if rho_stderr is not None else {}
        self.n_particles = n_particles
        self.seed = seed
        self.batches = batches

    def terminal_rho(self, name):
        return float(self.rho[name][-1])

    def terminal_pi(self, name):
        return float(self.pi[name][-1])


ORACLE_BATCHES = 10


def _batch_sizes(N, batches):
    base, extra = divmod(int(N), batches)
    return [base + (1 if k < extra else 0) for k in range(batches)]


def bootstrap_oracle(model, obs, N, rng, phi_list, batches=ORACLE_BATCHES):
    """Dirac-particle filter (alpha = 0) with N particles as numerical truth.

    The N particles are split into ``batches`` independent sub-filters, each
    on its own child stream of ``rng``. rho is the particle-weighted mean of
    the sub-filter estimates and pi = rho(phi) / rho(1). Terminal standard
    errors are sd / sqrt(batches) of the sub-filter estimates.

    Raises:
        ValueError: If there are fewer than two batches or fewer particles
            than batches.
    """
    if batches < 2:
        raise ValueError("bootstrap oracle needs at least 2 batches, got {}".format(batches))
    if N < batches:
        raise ValueError("bootstrap oracle needs N >= batches, got N={}, batches={}".format(
            N, batches))
    grid = obs.grid
    names = [phi.name for phi in phi_list]
    sizes = _batch_sizes(N, batches)
    rho_one = np.zeros(grid.steps + 1)
    rho = {name: np.zeros(grid.steps + 1) for name in names}
    terminal_rho = {name: [] for name in names}
    terminal_pi = {name: [] for name in names}
    for k, size in enumerate(sizes):
        cfg = FilterConfig(size, grid=grid, alpha=0.0)
        traj = run_filter(cfg, model, obs, phi_list, rng.child(k))
        share = float(size) / N
        rho_one += share * traj.rho_one
        for name in names:
            rho[name] += share * traj.rho(name)
            terminal_rho[name].append(traj.rho(name)[-1])
            terminal_pi[name].append(traj.pi(name)[-1])
    pi = {name: rho[name] / rho_one for name in names}
    root = np.sqrt(batches)
    stderr = {name: float(np.std(terminal_pi[name], ddof=1) / root) for name in names}
    rho_stderr = {name: float(np.std(terminal_rho[name], ddof=1) / root) for name in names}
    return OracleEstimate(grid, rho_one, rho, pi, stderr, N,
                          rho_stderr=rho_stderr, batches=batches)


class OracleCache(object):
    """Bootstrap oracle results on disk, computed once per observation path.

    Entries are keyed by SHA-1 of (model parameters, observation content
    hash, N, seed, batch count, test-function names).
    """

    def __init__(self, directory, batches=ORACLE_BATCHES):
        self.directory = directory
        self.batches = batches

    def key(self, model, obs, N, seed, phi_list):
        blob = json.dumps({"model": model.params(),
                           "obs": obs.content_hash(),
                           "N": int(N), "seed": int(seed),
                           "batches": int(self.batches),
                           "phi": [phi.name for phi in phi_list]}, sort_keys=True)
        return hashlib.sha1(blob.encode("utf-8")).hexdigest()

    def get(self, model, obs, N, seed, phi_list, rng_factory):
        """Cached estimate, or a fresh one from ``bootstrap_oracle``.

        Args:
            rng_factory: Callable ``seed -> RngStream`` used on a cache miss.
        """
        key = self.key(model, obs, N, seed, phi_list)
        csv_path = join(self.directory, "oracle_{}.csv".format(key))
        meta_path = join(self.directory, "oracle_{}.json".format(key))
        names = [phi.name for phi in phi_list]
        if exists(csv_path) and exists(meta_path):
            return self._load(csv_path, meta_path, obs.grid, names, N, seed)

        print(" [*] Computing bootstrap oracle (N={}) for {}".format(N, key[:10]))
        est = bootstrap_oracle(model, obs, N, rng_factory(seed), phi_list,
                               batches=self.batches)
        est.seed = seed
        os.makedirs(self.directory, exist_ok=True)
        header = ["t", "rho_1"]
        columns = [obs.grid.times, est.rho_one]
        for name in names:
            header += ["rho_" + name, "pi_" + name]
            columns += [est.rho[name], est.pi[name]]
        np.savetxt(csv_path, np.column_stack(columns), fmt=_CSV_FMT, delimiter=",",
                   header=",".join(header), comments="")
        with open(meta_path, "w") as f:
            json.dump({"N": int(N), "seed": int(seed), "batches": int(self.batches),
                       "stderr": est.stderr, "rho_stderr": est.rho_stderr}, f,
                      indent=2, sort_keys=True)
        return est

    def _load(self, csv_path, meta_path, grid, names, N, seed):
        data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
        with open(meta_path) as f:
            meta = json.load(f)
        rho = {name: data[:, 2 + 2 * i] for i, name in enumerate(names)}
        pi = {name: data[:, 3 + 2 * i] for i, name in enumerate(names)}
        return OracleEstimate(grid, data[:, 1], rho, pi, meta["stderr"], N, seed,
                              rho_stderr=meta["rho_stderr"], batches=meta["batches"])
