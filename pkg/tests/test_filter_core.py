# coding: utf-8
from __future__ import with_statement, print_function, absolute_import

import sys
from os.path import dirname, join
sys.path.insert(0, join(dirname(__file__), ".."))

import numpy as np
import pytest

from gaussmix_filter.filter_core import (
    FilterConfig, FilterState, correct, evolve_substep, init_filter, multinomial_offspring,
    recording_steps, run_filter)
from gaussmix_filter.gaussmix import gauss_expect_many
from gaussmix_filter.models import bounded_sine, linear_ou, make_test_function
from gaussmix_filter.paths import (
    RngStream, TimeGrid, ZeroStream, reference_observation, replica_stream, simulate_paths)

GRID = TimeGrid(dt=0.01, T=0.5, delta=0.1)


def _phis(*names):
    return [make_test_function(name) for name in names]


def test_config():
    cfg = FilterConfig(100, epsilon=0.5, beta=2.0, grid=GRID)
    assert np.isclose(cfg.alpha, 0.1)
    assert np.isclose(cfg.initial_variance, 0.2)
    lo, hi = cfg.variance_band(bounded_sine())
    assert np.isclose(lo, 0.2)
    assert np.isclose(hi, 0.1 * (2.0 + 1.5 ** 2 * 0.1))
    assert FilterConfig(1, grid=GRID).alpha == 1.0
    assert FilterConfig(10, grid=GRID, alpha=0.0).alpha == 0.0
    with pytest.raises(ValueError):
        FilterConfig(10, epsilon=0.0)
    with pytest.raises(ValueError):
        FilterConfig(10, epsilon=1.5)
    with pytest.raises(ValueError):
        FilterConfig(10, beta=0.0)
    with pytest.raises(ValueError):
        FilterConfig(0)


def test_init():
    cfg = FilterConfig(50, grid=GRID)
    state = init_filter(cfg, linear_ou(), RngStream(1, 2))
    assert state.n == 50
    assert np.all(state.log_weights == 0)
    assert np.allclose(state.variances, cfg.alpha)
    assert state.rho_one() == pytest.approx(1.0, abs=1e-12)
    assert state.effective_sample_size() == pytest.approx(50.0)
    first = state.particles[0]
    assert first.log_weight == 0.0
    assert first.mean == state.means[0]
    assert first.variance == pytest.approx(cfg.alpha)


def test_deterministic_substep():
    theta, dt = 1.0, GRID.dt
    model = linear_ou(theta=theta, initial_mean=2.0, initial_stddev=0.0)
    cfg = FilterConfig(4, grid=GRID, alpha=1.0)
    state = init_filter(cfg, model, ZeroStream())
    assert np.all(state.means == 2.0)
    evolve_substep(state, 0.0, dt, cfg, model, ZeroStream())
    assert np.allclose(state.means, 2.0 - theta * 2.0 * dt)
    assert np.allclose(state.variances, 1.0 + dt)
    # log a += h dY - h^2 dt / 2 with h = gamma v = 2
    assert np.allclose(state.log_weights, -0.5 * 4.0 * dt)
    assert state.step == 1


def test_correction_bookkeeping():
    model = linear_ou()
    cfg = FilterConfig(40, grid=GRID)
    _, obs = simulate_paths(model, GRID, 3)
    rng = RngStream(3, 2)
    state = init_filter(cfg, model, rng)
    m = GRID.substeps_per_interval
    for k in range(m - 1):
        evolve_substep(state, obs.increments[k], GRID.dt, cfg, model, rng)
    with pytest.raises(ValueError, match="not a correction time"):
        correct(state, cfg, rng)
    evolve_substep(state, obs.increments[m - 1], GRID.dt, cfg, model, rng)
    assert state.pending_correction
    with pytest.raises(RuntimeError):
        evolve_substep(state, obs.increments[m], GRID.dt, cfg, model, rng)

    rho_before = state.rho_one()
    log_mean_weight = state.log_mean_weight
    ess = state.effective_sample_size()
    snapshot = state.copy()
    correct(state, cfg, rng, _phis("x"))
    assert snapshot.interval_index == 0
    assert snapshot.pending_correction
    assert not np.all(snapshot.log_weights == 0)
    assert not state.pending_correction
    assert state.interval_index == 1
    assert state.n == 40
    assert np.all(state.log_weights == 0)
    assert np.allclose(state.variances, cfg.initial_variance)
    assert state.log_xi == pytest.approx(log_mean_weight)
    assert state.rho_one() == pytest.approx(rho_before, rel=1e-12)
    record = state.last_correction
    assert record["interval"] == 1
    assert record["ess"] == pytest.approx(ess)
    assert "branch_x" in record
    # next substep is allowed again
    evolve_substep(state, obs.increments[m], GRID.dt, cfg, model, rng)


def test_multinomial_offspring():
    rng = RngStream(5, 2)
    for _ in range(20):
        w = rng.generator.dirichlet(np.ones(7))
        counts = multinomial_offspring(w / w.sum(), 100, rng)
        assert counts.sum() == 100
        assert np.all(counts >= 0)
    with pytest.raises(ValueError, match="invalid weights"):
        multinomial_offspring([0.5, 0.6], 10, rng)
    with pytest.raises(ValueError, match="invalid weights"):
        multinomial_offspring([1.5, -0.5], 10, rng)
    with pytest.raises(ValueError, match="invalid weights"):
        multinomial_offspring([np.nan, 1.0], 10, rng)


def test_multinomial_offspring_frequencies():
    n = 400000
    counts = multinomial_offspring(np.full(4, 0.25), n, RngStream(6, 2))
    sigma = np.sqrt(0.25 * 0.75 / n)
    assert counts.sum() == n
    assert np.all(np.abs(counts / n - 0.25) <= 5 * sigma)


def _frozen_state(log_weights, means, variances):
    return FilterState(GRID, np.array(log_weights, dtype=np.float64),
                       np.array(means, dtype=np.float64),
                       np.array(variances, dtype=np.float64),
                       step=GRID.substeps_per_interval)


def test_correction_law():
    state = _frozen_state([0.3, -1.2, 0.8, 0.0, -0.4], [-1.5, -0.2, 0.4, 1.1, 2.0],
                          [0.05, 0.2, 0.1, 0.3, 0.15])
    assert state.pending_correction
    cfg = FilterConfig(5, epsilon=0.5, beta=1.0, grid=GRID)
    spread = state.variances + cfg.alpha * cfg.beta
    phis = _phis("tanh", "x2")
    expected = {phi.name: float(state.normalized_weights @ gauss_expect_many(
        state.means, spread, phi)) for phi in phis}

    rng = RngStream(8, 2)
    runs = 10000
    after = {phi.name: np.empty(runs) for phi in phis}
    for r in range(runs):
        child = correct(state.copy(), cfg, rng)
        for phi in phis:
            after[phi.name][r] = child.pi(phi)
    assert state.interval_index == 0
    for phi in phis:
        values = after[phi.name]
        err = np.std(values, ddof=1) / np.sqrt(runs)
        assert abs(values.mean() - expected[phi.name]) <= 5 * err


def test_single_particle_correction():
    cfg = FilterConfig(1, grid=GRID)
    state = _frozen_state([0.7], [0.3], [0.05])
    correct(state, cfg, ZeroStream())
    assert state.n == 1
    assert state.log_xi == pytest.approx(0.7, abs=1e-15)
    assert state.means[0] == 0.3
    assert state.variances[0] == cfg.initial_variance
    assert state.log_weights[0] == 0.0

    state = _frozen_state([-2.5], [0.3], [0.05])
    correct(state, cfg, RngStream(9, 2))
    assert state.n == 1
    assert state.log_xi == pytest.approx(-2.5, abs=1e-15)


def test_run_filter_invariants():
    model = bounded_sine()
    grid = TimeGrid(dt=0.005, T=0.5, delta=0.05)
    _, obs = simulate_paths(model, grid, 21)
    phis = _phis("one", "x", "x2", "tanh")
    cfg = FilterConfig(64, epsilon=0.5, beta=1.0, grid=grid)
    traj = run_filter(cfg, model, obs, phis, replica_stream(21, 0))
    assert traj.complete
    assert len(traj.corrections) == grid.intervals - 1
    assert np.all(np.isfinite(traj.rho_one)) and np.all(traj.rho_one > 0)
    for phi in phis:
        # rho = rho(1) pi by construction
        assert np.allclose(traj.rho(phi.name), traj.rho_one * traj.pi(phi.name),
                           rtol=1e-10, atol=0)
    assert np.allclose(traj.pi("one"), 1.0, atol=1e-12)
    assert np.allclose(traj.rho("one"), traj.rho_one, rtol=1e-12)
    final = traj.final_state
    assert np.all(np.isfinite(final.log_weights))
    assert abs(final.normalized_weights.sum() - 1.0) <= 1e-12
    assert traj.intervals[-1] == grid.intervals - 1
    for record in traj.corrections:
        assert 1.0 <= record["ess"] <= 64.0


def test_variances_stay_in_band():
    model = bounded_sine()
    cfg = FilterConfig(30, epsilon=0.5, beta=0.5, grid=GRID)
    lo, hi = cfg.variance_band(model)
    _, obs = simulate_paths(model, GRID, 4)
    rng = RngStream(4, 2)
    state = init_filter(cfg, model, rng)
    for step in range(1, GRID.steps + 1):
        evolve_substep(state, obs.increments[step - 1], GRID.dt, cfg, model, rng)
        assert np.all(state.variances >= lo - 1e-15)
        assert np.all(state.variances <= hi + 1e-15)
        if step < GRID.steps and GRID.is_correction_step(step):
            correct(state, cfg, rng)


def test_no_observation_keeps_rho_one():
    model = linear_ou(gamma=0.0)
    _, obs = simulate_paths(model, GRID, 8)
    traj = run_filter(FilterConfig(20, grid=GRID), model, obs, _phis("x"), RngStream(8, 2))
    assert np.allclose(traj.rho_one, 1.0, rtol=0, atol=1e-12)


def test_reproducible():
    model = linear_ou()
    _, obs = simulate_paths(model, GRID, 2)
    cfg = FilterConfig(25, grid=GRID)
    a = run_filter(cfg, model, obs, _phis("x"), replica_stream(2, 1))
    b = run_filter(cfg, model, obs, _phis("x"), replica_stream(2, 1))
    c = run_filter(cfg, model, obs, _phis("x"), replica_stream(2, 2))
    assert np.array_equal(a.rho("x"), b.rho("x"))
    assert not np.array_equal(a.rho("x"), c.rho("x"))


def test_grid_mismatch():
    model = linear_ou()
    _, obs = simulate_paths(model, GRID, 2)
    cfg = FilterConfig(10, grid=TimeGrid(dt=0.005, T=0.5, delta=0.1))
    with pytest.raises(ValueError, match="grid mismatch"):
        run_filter(cfg, model, obs, _phis("x"), RngStream(2, 2))


def test_recording_steps():
    steps = recording_steps(GRID, stride=20, extra=[25])
    assert steps == [0, 20, 25, 40, 50]
    traj = run_filter(FilterConfig(10, grid=GRID), linear_ou(),
                      simulate_paths(linear_ou(), GRID, 1)[1], _phis("x"),
                      RngStream(1, 2), record_steps=steps, keep_particles=True)
    assert not traj.complete
    assert np.allclose(traj.times, np.array(steps) * GRID.dt)
    assert len(traj.particle_dumps) == GRID.intervals - 1
    with pytest.raises(ValueError, match="was not recorded"):
        traj.pi("x2")


def test_trajectory_csv(tmp_path):
    model = linear_ou()
    _, obs = simulate_paths(model, GRID, 2)
    traj = run_filter(FilterConfig(10, grid=GRID), model, obs, _phis("x", "x2"),
                      RngStream(2, 2))
    path = str(tmp_path / "traj.csv")
    traj.to_csv(path)
    traj.corrections_to_csv(str(tmp_path / "corr.csv"))
    with open(path) as f:
        assert f.readline().strip() == "t,interval,rho_1,pi_x,rho_x,pi_x2,rho_x2"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (GRID.steps + 1, 7)
    corr = np.loadtxt(str(tmp_path / "corr.csv"), delimiter=",", skiprows=1, ndmin=2)
    assert corr.shape[0] == GRID.intervals - 1


def test_xi_is_a_martingale_under_the_reference_measure():
    grid = TimeGrid(dt=0.01, T=0.2, delta=0.1)
    model = linear_ou()
    cfg = FilterConfig(20, grid=grid)
    values = []
    for r in range(2000):
        obs = reference_observation(grid, RngStream(99, 1, substream=r))
        traj = run_filter(cfg, model, obs, [], replica_stream(99, r),
                          record_steps=[0, grid.steps])
        values.append(traj.rho_one[-1])
    values = np.asarray(values)
    stderr = values.std(ddof=1) / np.sqrt(len(values))
    assert abs(values.mean() - 1.0) <= 4 * stderr
