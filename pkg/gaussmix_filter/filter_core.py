# coding: utf-8
"""Gaussian mixture particle approximation of the filtering problem.

Each generalised particle is a triple (a_j, v_j, w_j): unnormalised weight,
Gaussian mean and Gaussian variance. Between corrections the triple evolves
by

    da_j = a_j h(v_j) dY
    dv_j = f(v_j) dt + sqrt(1 - alpha) sigma(v_j) dV_j
    dw_j = alpha sigma(v_j)^2 dt

with alpha = n^-epsilon. Every ``delta`` the population is replaced by n
offspring drawn by multinomial resampling; offspring j is N(X_j, alpha*beta)
with X_j ~ N(v_j, w_j). The running product of mean weights ``xi`` turns the
normalised approximation pi^n into the unnormalised rho^n = xi * pi^n.

Weights are kept in log space, so positivity is structural.
"""
from collections import namedtuple

import numpy as np
from scipy.special import logsumexp

from gaussmix_filter.gaussmix import WeightedMixture, gauss_expect_many

Particle = namedtuple("Particle", ["log_weight", "mean", "variance"])

_CSV_FMT = "%.17g"


class FilterConfig(object):
    """Particle count, Gaussianity exponent and smoothing parameter.

    Args:
        n (int): Number of Gaussian particles.
        epsilon (float): Gaussianity exponent in (0, 1]; alpha = n^-epsilon.
        beta (float): Smoothing parameter, post-correction variance alpha*beta.
        grid (TimeGrid): Time grid shared with the observation path.
        alpha (float): Overrides n^-epsilon. 0 gives Dirac particles (the
            bootstrap filter), 1 gives deterministic means.
    """

    def __init__(self, n, epsilon=0.5, beta=1.0, grid=None, alpha=None):
        if int(n) != n or n < 1:
            raise ValueError("n must be a positive integer, got {}".format(n))
        if beta <= 0:
            raise ValueError("beta must be positive, got {}".format(beta))
        if alpha is None:
            if not 0.0 < epsilon <= 1.0:
                raise ValueError("epsilon must lie in (0, 1], got {}".format(epsilon))
        elif not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1], got {}".format(alpha))
        self.n = int(n)
        self.epsilon = float(epsilon)
        self.beta = float(beta)
        self.grid = grid
        self._alpha = alpha

    @property
    def alpha(self):
        if self._alpha is not None:
            return float(self._alpha)
        return float(self.n) ** -self.epsilon

    @property
    def initial_variance(self):
        return self.alpha * self.beta

    def variance_band(self, model):
        """Bounds on every particle variance between corrections."""
        lo = self.alpha * self.beta
        hi = self.alpha * (self.beta + model.diffusion_bound ** 2 * self.grid.delta)
        return lo, hi

    def __repr__(self):
        return "FilterConfig(n={}, epsilon={}, beta={}, alpha={})".format(
            self.n, self.epsilon, self.beta, self.alpha)


class FilterState(object):
    """Particle population plus the xi accumulator and interval bookkeeping."""

    def __init__(self, grid, log_weights, means, variances, log_xi=0.0,
                 interval_index=0, step=0):
        self.grid = grid
        self.log_weights = log_weights
        self.means = means
        self.variances = variances
        self.log_xi = log_xi
        self.interval_index = interval_index
        self.step = step
        self.last_correction = None

    @property
    def n(self):
        return len(self.means)

    @property
    def time(self):
        return self.step * self.grid.dt

    @property
    def pending_correction(self):
        return (self.grid.is_correction_step(self.step) and
                self.interval_index < self.step // self.grid.substeps_per_interval)

    @property
    def particles(self):
        return [Particle(*p) for p in zip(self.log_weights, self.means, self.variances)]

    @property
    def log_mean_weight(self):
        """log((1/n) sum_j a_j)."""
        return logsumexp(self.log_weights) - np.log(self.n)

    @property
    def normalized_weights(self):
        w = np.exp(self.log_weights - logsumexp(self.log_weights))
        return w / w.sum()

    def mixture(self):
        return WeightedMixture(self.normalized_weights, self.means, self.variances)

    def rho_one(self):
        return float(np.exp(self.log_xi + self.log_mean_weight))

    def pi(self, phi):
        return float(self.normalized_weights @ gauss_expect_many(
            self.means, self.variances, phi))

    def rho(self, phi):
        return self.rho_one() * self.pi(phi)

    def pi_point_mass(self, phi):
        return float(self.normalized_weights @ np.asarray(phi(self.means), dtype=np.float64))

    def effective_sample_size(self):
        w = self.normalized_weights
        return float(1.0 / np.sum(w * w))

    def copy(self):
        return FilterState(self.grid, self.log_weights.copy(), self.means.copy(),
                           self.variances.copy(), self.log_xi, self.interval_index,
                           self.step)


def init_filter(cfg, model, rng):
    """n equally weighted Gaussians, means i.i.d. from the initial law."""
    n = cfg.n
    means = model.initial_mean + model.initial_stddev * rng.standard_normal(n)
    return FilterState(cfg.grid,
                       log_weights=np.zeros(n),
                       means=np.asarray(means, dtype=np.float64),
                       variances=np.full(n, cfg.initial_variance))


def evolve_substep(state, dy, dt, cfg, model, rng):
    """One Euler substep of the weight/mean/variance triple, in place.

    The weight update is the exact log form ``log a += h dY - h^2 dt / 2`` for
    h frozen at the pre-update mean; mean and variance also use the
    pre-update mean.

    Raises:
        RuntimeError: If a correction is due at the current time.
    """
    if state.pending_correction:
        raise RuntimeError("correction pending at t={}".format(state.time))
    v = state.means
    h = model.sensor(v)
    s = model.diffusion(v)
    zeta = rng.standard_normal(state.n)
    alpha = cfg.alpha
    state.log_weights = state.log_weights + h * dy - 0.5 * h * h * dt
    state.means = v + model.drift(v) * dt + np.sqrt(1.0 - alpha) * s * np.sqrt(dt) * zeta
    state.variances = state.variances + alpha * s * s * dt
    state.step += 1
    return state


def multinomial_offspring(weights, n, rng):
    """Offspring counts ~ Multinomial(n; weights).

    Raises:
        ValueError: ``invalid weights`` for negative entries or a sum away
            from 1 by more than 1e-9.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(weights < 0) or not np.all(np.isfinite(weights)) or \
            abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("invalid weights")
    counts = rng.multinomial(n, weights / weights.sum())
    assert counts.sum() == n
    return counts


def correct(state, cfg, rng, phi_list=()):
    """Multinomial branching at a correction time, in place.

    Each X_j ~ N(v_j, w_j) is drawn first, then one multinomial draw decides
    how many offspring N(X_j, alpha*beta) each X_j leaves. Weights reset to 1
    and xi absorbs the pre-correction mean weight.

    The correction record (time, interval, log mean weight, ESS and, for
    each phi, the branching increment rho_after - rho_before) is left in
    ``state.last_correction``.

    Raises:
        ValueError: ``not a correction time`` off the correction grid.
    """
    if not state.pending_correction:
        raise ValueError("not a correction time: t={}".format(state.time))
    n = state.n
    ess = state.effective_sample_size()
    weights = state.normalized_weights
    before = {phi.name: state.pi(phi) for phi in phi_list}
    log_mean_weight = state.log_mean_weight

    state.log_xi += log_mean_weight
    x = state.means + np.sqrt(state.variances) * rng.standard_normal(n)
    counts = multinomial_offspring(weights, n, rng)

    state.means = np.repeat(x, counts)
    state.variances = np.full(n, cfg.initial_variance)
    state.log_weights = np.zeros(n)
    state.interval_index += 1

    xi = np.exp(state.log_xi)
    record = {"t": state.time,
              "interval": state.interval_index,
              "log_mean_weight": float(log_mean_weight),
              "ess": ess}
    for phi in phi_list:
        record["branch_" + phi.name] = float(xi * (state.pi(phi) - before[phi.name]))
    state.last_correction = record
    return state


class FilterTrajectory(object):
    """Snapshots of pi^n(phi), rho^n(phi) and rho^n(1) at recorded grid steps.

    ``rho_point`` holds the variance-stripped counterpart xi * sum a_j phi(v_j).
    """

    def __init__(self, grid, steps, names):
        self.grid = grid
        self.steps = np.asarray(steps, dtype=np.int64)
        self.times = self.steps * grid.dt
        self.names = list(names)
        size = len(self.steps)
        self.intervals = np.zeros(size, dtype=np.int64)
        self.rho_one = np.zeros(size)
        self._pi = {name: np.zeros(size) for name in self.names}
        self._rho = {name: np.zeros(size) for name in self.names}
        self._rho_point = {name: np.zeros(size) for name in self.names}
        self.corrections = []
        self.particle_dumps = []
        self.final_state = None
        self._index = {int(s): i for i, s in enumerate(self.steps)}

    def record(self, state, phi_list):
        i = self._index[state.step]
        w = state.normalized_weights
        rho1 = state.rho_one()
        self.intervals[i] = state.interval_index
        self.rho_one[i] = rho1
        for phi in phi_list:
            pi = float(w @ gauss_expect_many(state.means, state.variances, phi))
            self._pi[phi.name][i] = pi
            self._rho[phi.name][i] = rho1 * pi
            self._rho_point[phi.name][i] = rho1 * state.pi_point_mass(phi)

    def set_series(self, rho_one, pi_by_name):
        """Fill every snapshot from exact series (no particle population)."""
        self.rho_one = np.asarray(rho_one, dtype=np.float64)
        for name, pi in pi_by_name.items():
            self._pi[name] = np.asarray(pi, dtype=np.float64)
            self._rho[name] = self.rho_one * self._pi[name]
            self._rho_point[name] = self._rho[name]

    def _lookup(self, table, name):
        try:
            return table[name]
        except KeyError:
            raise ValueError("functional {} was not recorded".format(name))

    def pi(self, name):
        return self._lookup(self._pi, name)

    def rho(self, name):
        return self._lookup(self._rho, name)

    def rho_point(self, name):
        return self._lookup(self._rho_point, name)

    def index_of(self, step):
        return self._index[int(step)]

    def terminal(self):
        return self.index_of(self.grid.steps)

    @property
    def complete(self):
        """True when every grid time was recorded."""
        return len(self.steps) == self.grid.steps + 1

    def to_csv(self, path):
        header = ["t", "interval", "rho_1"]
        columns = [self.times, self.intervals, self.rho_one]
        for name in self.names:
            header += ["pi_" + name, "rho_" + name]
            columns += [self._pi[name], self._rho[name]]
        np.savetxt(path, np.column_stack(columns), fmt=_CSV_FMT, delimiter=",",
                   header=",".join(header), comments="")

    def corrections_to_csv(self, path):
        if not self.corrections:
            return
        header = list(self.corrections[0].keys())
        data = np.array([[rec[k] for k in header] for rec in self.corrections])
        np.savetxt(path, data, fmt=_CSV_FMT, delimiter=",",
                   header=",".join(header), comments="")


def recording_steps(grid, stride=1, extra=()):
    """Every ``stride``-th step plus ``extra``; 0 and the terminal step always."""
    steps = set(range(0, grid.steps + 1, max(int(stride), 1)))
    steps.update(int(s) for s in extra)
    steps.update([0, grid.steps])
    return sorted(steps)


def run_filter(cfg, model, obs, phi_list, rng, record_steps=None, keep_particles=False):
    """Run the filter through T on a given observation path.

    Snapshots at interior correction times are taken after the correction;
    the terminal snapshot at T is taken before it (no correction at T).

    Args:
        record_steps: Grid steps to snapshot; all steps when None.
        keep_particles: Keep (means, variances) after every correction.

    Raises:
        ValueError: If the observation grid does not match ``cfg.grid``.
    """
    grid = cfg.grid
    if not grid.matches(obs.grid):
        raise ValueError("grid mismatch: filter {} vs observation {}".format(grid, obs.grid))
    if record_steps is None:
        record_steps = range(grid.steps + 1)
    traj = FilterTrajectory(grid, sorted(set(record_steps)), [phi.name for phi in phi_list])
    wanted = set(traj.steps.tolist())

    state = init_filter(cfg, model, rng)
    if 0 in wanted:
        traj.record(state, phi_list)
    dt = grid.dt
    for step in range(1, grid.steps + 1):
        evolve_substep(state, obs.increments[step - 1], dt, cfg, model, rng)
        if step < grid.steps and grid.is_correction_step(step):
            traj.corrections.append(correct(state, cfg, rng, phi_list).last_correction)
            if keep_particles:
                traj.particle_dumps.append((state.time, state.means.copy(),
                                            state.variances.copy()))
        if step in wanted:
            traj.record(state, phi_list)
    traj.final_state = state
    return traj
