# coding: utf-8
"""Monte Carlo studies of the rate and the fluctuations of the filter error.

Replicas are independent tasks. Each replica owns its particle streams, so
results do not depend on how many worker processes run them; per-replica
results are always combined in replica order.
"""
import json
import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from os.path import join

import numpy as np
from scipy import stats
from tqdm import tqdm

from gaussmix_filter import __version__
from gaussmix_filter.error_analysis import (
    rescaled_error, variance_contribution_gap, variance_gap_bound, zakai_functionals,
    zakai_residual)
from gaussmix_filter.filter_core import FilterConfig, recording_steps, run_filter
from gaussmix_filter.gaussmix import gauss_expect_many
from gaussmix_filter.models import (
    MODEL_NAMES, PROBE, TEST_FUNCTION_NAMES, make_builtin_model, make_test_function)
from gaussmix_filter.oracles import (
    ORACLE_BATCHES, OracleCache, bootstrap_oracle, kalman_bucy, reference_trajectory)
from gaussmix_filter.paths import (
    REPLICA_STREAM_BASE, RngStream, TimeGrid, replica_stream, simulate_paths)

_CSV_FMT = "%.17g"

# Acceptance bands of the log-log MSE slope, keyed by epsilon
_SLOPE_BANDS = {
    0.25: (-0.80, -0.25),
    0.5: (-1.35, -0.65),
    1.0: (-1.40, -0.60),
}


def predicted_slope(epsilon):
    return -min(2.0 * epsilon, 1.0)


def slope_band(epsilon, band=None):
    """Accepted slope interval; ``band`` wins when it has exactly two entries."""
    if band is not None and len(band) == 2:
        return float(band[0]), float(band[1])
    if epsilon in _SLOPE_BANDS:
        return _SLOPE_BANDS[epsilon]
    p = predicted_slope(epsilon)
    return p - 0.4, p + 0.4


def _check_sweep(n_grid, replicas):
    n_grid = list(n_grid)
    if len(n_grid) < 4:
        raise ValueError("n_grid needs at least 4 entries, got {}".format(n_grid))
    if any(n < 1 for n in n_grid) or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be strictly increasing positive integers, got {}".format(
            n_grid))
    if replicas < 50:
        raise ValueError("replicas must be >= 50, got {}".format(replicas))


def model_params(hparams):
    if hparams.model == "linear_ou":
        return {"theta": hparams.get("model.theta"),
                "sigma0": hparams.get("model.sigma0"),
                "gamma": hparams.get("model.gamma")}
    return {}


def validate_hparams(hparams, study=True):
    """Check a resolved configuration.

    Raises:
        ValueError: Naming the offending key.
    """
    if hparams.model not in MODEL_NAMES:
        raise ValueError("model: unknown model {}".format(hparams.model))
    if hparams.phi not in TEST_FUNCTION_NAMES:
        raise ValueError("phi: unknown test function {}".format(hparams.phi))
    if not 0.0 < hparams.epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1], got {}".format(hparams.epsilon))
    if hparams.beta <= 0:
        raise ValueError("beta must be positive, got {}".format(hparams.beta))
    if hparams.record_stride < 1:
        raise ValueError("record_stride must be >= 1, got {}".format(hparams.record_stride))
    if hparams.oracle_particles < ORACLE_BATCHES:
        raise ValueError("oracle_particles must be >= {}, got {}".format(
            ORACLE_BATCHES, hparams.oracle_particles))
    TimeGrid(hparams.dt, hparams.T, hparams.delta)
    if study:
        _check_sweep(hparams.n_grid, hparams.replicas)
    elif not hparams.n_grid or any(n < 1 for n in hparams.n_grid):
        raise ValueError("n_grid must list positive particle counts, got {}".format(
            hparams.n_grid))
    lo, hi = hparams.get("clt.var_ratio_band")[0], hparams.get("clt.var_ratio_band")[-1]
    if len(hparams.get("clt.var_ratio_band")) != 2 or not 0 < lo < hi:
        raise ValueError("clt.var_ratio_band must be [lo, hi] with 0 < lo < hi")
    if not 0.0 < hparams.get("clt.ks_level") < 1.0:
        raise ValueError("clt.ks_level must lie in (0, 1)")
    return hparams


def default_tag(hparams):
    if hparams.tag:
        return hparams.tag
    return "{}_{}_eps{:g}".format(hparams.model, hparams.phi, hparams.epsilon)


class ConvergenceStudyConfig(object):
    """Parameters of :func:`run_convergence_study`.

    Raises:
        ValueError: For a sweep with fewer than 4 particle counts, counts
            that are not strictly increasing, or fewer than 50 replicas.
    """

    def __init__(self, model, phi, epsilon, n_grid, replicas, grid, master_seed,
                 beta=1.0, model_params=None, stream_offset=0, band=None,
                 oracle_particles=1000000, oracle_seed=7, cache_dir=None):
        _check_sweep(n_grid, replicas)
        self.model = model
        self.phi = phi
        self.epsilon = epsilon
        self.n_grid = [int(n) for n in n_grid]
        self.replicas = replicas
        self.grid = grid
        self.master_seed = master_seed
        self.beta = beta
        self.model_params = dict(model_params or {})
        self.stream_offset = stream_offset
        self.slope_band = slope_band(epsilon, band)
        self.oracle_particles = oracle_particles
        self.oracle_seed = oracle_seed
        self.cache_dir = cache_dir

    @classmethod
    def from_hparams(cls, hparams, cache_dir=None):
        return cls(model=hparams.model, phi=hparams.phi, epsilon=hparams.epsilon,
                   n_grid=hparams.n_grid, replicas=hparams.replicas,
                   grid=TimeGrid(hparams.dt, hparams.T, hparams.delta),
                   master_seed=hparams.master_seed, beta=hparams.beta,
                   model_params=model_params(hparams),
                   stream_offset=hparams.stream_offset,
                   band=hparams.get("converge.slope_band"),
                   oracle_particles=hparams.oracle_particles,
                   oracle_seed=hparams.oracle_seed, cache_dir=cache_dir)

    def build_model(self):
        return make_builtin_model(self.model, **self.model_params)


class ConvergenceReport(object):
    """Outcome of a convergence study.

    ``mse_stderr`` is the per-n standard error of the MSE; ``slope_stderr``
    that of the fitted slope, which the JSON report stores as ``stderr``.
    """

    def __init__(self, epsilon, n_grid, mse, mse_stderr, pi_mse, half_mse, slope, intercept,
                 slope_stderr, predicted_slope, slope_band, checks):
        self.epsilon = epsilon
        self.n_grid = n_grid
        self.mse = mse
        self.mse_stderr = mse_stderr
        self.pi_mse = pi_mse
        self.half_mse = half_mse
        self.slope = slope
        self.intercept = intercept
        self.slope_stderr = slope_stderr
        self.predicted_slope = predicted_slope
        self.slope_band = slope_band
        self.checks = checks

    @property
    def passed(self):
        return all(self.checks.values())

    def to_dict(self):
        return {"epsilon": self.epsilon,
                "n": list(self.n_grid),
                "mse": list(self.mse),
                "mse_stderr": list(self.mse_stderr),
                "pi_mse": list(self.pi_mse),
                "half_mse": list(self.half_mse),
                "slope": self.slope,
                "intercept": self.intercept,
                "stderr": self.slope_stderr,
                "predicted_slope": self.predicted_slope,
                "slope_band": list(self.slope_band),
                "checks": dict(self.checks),
                "pass": bool(self.passed)}


class CltStudyConfig(object):
    """Parameters of :func:`run_clt_study`.

    ``observation`` freezes the observation path; without it one is
    simulated from ``master_seed``.

    Raises:
        ValueError: As :class:`ConvergenceStudyConfig`, and when no n of
            ``n_grid`` comes with 4n.
    """

    def __init__(self, model, phi, epsilon, n_grid, replicas, grid, master_seed,
                 beta=1.0, model_params=None, stream_offset=0, var_ratio_band=(0.4, 2.5),
                 ks_factor=1.5, ks_level=0.01, divergence_ratio=2.0,
                 oracle_particles=1000000, oracle_seed=7, cache_dir=None, observation=None):
        _check_sweep(n_grid, replicas)
        n_grid = [int(n) for n in n_grid]
        if not variance_pairs(n_grid):
            raise ValueError("n_grid must contain some n together with 4n, got {}".format(
                n_grid))
        self.model = model
        self.phi = phi
        self.epsilon = epsilon
        self.n_grid = n_grid
        self.replicas = replicas
        self.grid = grid
        self.master_seed = master_seed
        self.beta = beta
        self.model_params = dict(model_params or {})
        self.stream_offset = stream_offset
        self.var_ratio_band = tuple(var_ratio_band)
        self.ks_factor = ks_factor
        self.ks_level = ks_level
        self.divergence_ratio = divergence_ratio
        self.oracle_particles = oracle_particles
        self.oracle_seed = oracle_seed
        self.cache_dir = cache_dir
        self.observation = observation

    @classmethod
    def from_hparams(cls, hparams, cache_dir=None, observation=None):
        return cls(model=hparams.model, phi=hparams.phi, epsilon=hparams.epsilon,
                   n_grid=hparams.n_grid, replicas=hparams.replicas,
                   grid=TimeGrid(hparams.dt, hparams.T, hparams.delta),
                   master_seed=hparams.master_seed, beta=hparams.beta,
                   model_params=model_params(hparams),
                   stream_offset=hparams.stream_offset,
                   var_ratio_band=tuple(hparams.get("clt.var_ratio_band")),
                   ks_factor=hparams.get("clt.ks_factor"),
                   ks_level=hparams.get("clt.ks_level"),
                   divergence_ratio=hparams.get("clt.divergence_ratio"),
                   oracle_particles=hparams.oracle_particles,
                   oracle_seed=hparams.oracle_seed, cache_dir=cache_dir,
                   observation=observation)

    def build_model(self):
        return make_builtin_model(self.model, **self.model_params)


class CltReport(object):
    def __init__(self, epsilon, n_grid, samples, summary, variance_ratios, ks_critical,
                 observation_hash, rho_reference, checks):
        self.epsilon = epsilon
        self.n_grid = n_grid
        self.samples = samples
        self.summary = summary
        self.variance_ratios = variance_ratios
        self.ks_critical = ks_critical
        self.observation_hash = observation_hash
        self.rho_reference = rho_reference
        self.checks = checks

    @property
    def passed(self):
        return all(self.checks.values())

    def to_dict(self):
        return {"epsilon": self.epsilon,
                "n": list(self.n_grid),
                "per_n": {str(n): self.summary[n] for n in self.n_grid},
                "variance_ratios": self.variance_ratios,
                "ks_critical": self.ks_critical,
                "observation_hash": self.observation_hash,
                "rho_reference": self.rho_reference,
                "checks": self.checks,
                "pass": bool(self.passed)}


def convergence_checks(slope, band, mse):
    """Slope inside ``band`` and the MSE at the largest n below the one at the smallest."""
    lo, hi = band
    return {"slope_in_band": bool(lo <= slope <= hi),
            "mse_decreases": bool(mse[-1] < mse[0])}


def fit_loglog_slope(points):
    """Weighted least squares of log y on log x.

    Args:
        points: Iterable of ``(x, y)`` or ``(x, y, weight)`` with x, y > 0.

    Returns:
        tuple: ``(slope, intercept, stderr)``; stderr is nan for exactly two
        points.

    Raises:
        ValueError: ``degenerate x-values`` with fewer than two distinct x.
    """
    pts = np.asarray([tuple(p) + (1.0,) * (3 - len(p)) for p in points], dtype=np.float64)
    if pts.ndim != 2 or len(np.unique(pts[:, 0])) < 2:
        raise ValueError("degenerate x-values")
    if np.any(pts[:, :2] <= 0) or np.any(pts[:, 2] <= 0):
        raise ValueError("fit_loglog_slope needs x, y and weights > 0")
    lx, ly, w = np.log(pts[:, 0]), np.log(pts[:, 1]), pts[:, 2]
    X = np.column_stack([np.ones_like(lx), lx])
    sw = np.sqrt(w)
    coef, _, _, _ = np.linalg.lstsq(X * sw[:, None], ly * sw, rcond=None)
    intercept, slope = coef
    k = len(lx)
    if k <= 2:
        return float(slope), float(intercept), float("nan")
    resid = ly - X @ coef
    s2 = np.sum(w * resid * resid) / (k - 2)
    cov = s2 * np.linalg.inv(X.T @ (w[:, None] * X))
    return float(slope), float(intercept), float(np.sqrt(cov[1, 1]))


def ks_normal_distance(samples):
    """KS statistic of the standardised samples against N(0, 1).

    Raises:
        ValueError: ``zero variance`` for constant samples, or fewer than 20
            samples.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 20:
        raise ValueError("ks_normal_distance needs >= 20 samples, got {}".format(x.size))
    sd = np.std(x, ddof=1)
    if not sd > 0:
        raise ValueError("zero variance")
    return float(stats.kstest((x - x.mean()) / sd, "norm").statistic)


def ks_critical_value(m, level=0.01):
    """Exact two-sided Kolmogorov critical value for m samples."""
    return float(stats.kstwo.ppf(1.0 - level, m))


def variance_pairs(n_grid):
    present = set(n_grid)
    return [(n, 4 * n) for n in n_grid if 4 * n in present]


def _map_replicas(task, replicas, threads, desc):
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            futures = [executor.submit(partial(task, r)) for r in range(replicas)]
            return [future.result() for future in tqdm(futures, desc=desc)]
    return [task(r) for r in tqdm(range(replicas), desc=desc)]


def _oracle_rng(seed):
    return RngStream(seed, REPLICA_STREAM_BASE)


def reference_values(cfg, model, obs, phi, steps):
    """rho(phi) and pi(phi) of the reference solution at the given grid steps."""
    steps = np.asarray(steps)
    if model.is_linear:
        moments = kalman_bucy(model, obs)
        rho1 = moments.rho_one()[steps]
        pi = gauss_expect_many(moments.mean[steps], moments.variance[steps], phi)
        return rho1 * pi, pi
    if cfg.cache_dir:
        est = OracleCache(cfg.cache_dir).get(model, obs, cfg.oracle_particles,
                                             cfg.oracle_seed, [phi], _oracle_rng)
    else:
        est = bootstrap_oracle(model, obs, cfg.oracle_particles,
                               _oracle_rng(cfg.oracle_seed), [phi])
    return est.rho[phi.name][steps], est.pi[phi.name][steps]


def _convergence_replica(cfg, replica):
    model = cfg.build_model()
    phi = make_test_function(cfg.phi)
    grid = cfg.grid
    half = grid.steps // 2
    _, obs = simulate_paths(model, grid, cfg.master_seed, substream=replica)
    ref_rho, ref_pi = reference_values(cfg, model, obs, phi, [half, grid.steps])
    record = recording_steps(grid, stride=grid.steps, extra=[half])
    rows = []
    for n in cfg.n_grid:
        fcfg = FilterConfig(n, cfg.epsilon, cfg.beta, grid)
        rng = replica_stream(cfg.master_seed, replica, substream=n, offset=cfg.stream_offset)
        traj = run_filter(fcfg, model, obs, [phi], rng, record_steps=record)
        i_half, i_end = traj.index_of(half), traj.terminal()
        rows.append(((traj.rho(phi.name)[i_end] - ref_rho[1]) ** 2,
                     (traj.pi(phi.name)[i_end] - ref_pi[1]) ** 2,
                     (traj.rho(phi.name)[i_half] - ref_rho[0]) ** 2))
    return rows


def run_convergence_study(cfg, threads=1, writer=None):
    """Mean squared error of rho^n_T(phi) across n, and its log-log slope.

    Every replica draws a fresh (signal, observation) pair; all particle
    counts of a replica filter the same pair.
    """
    print(" [*] Convergence study: {} replicas x n={} (epsilon={})".format(
        cfg.replicas, cfg.n_grid, cfg.epsilon))
    results = _map_replicas(partial(_convergence_replica, cfg), cfg.replicas, threads,
                            "converge")
    # (replicas, len(n_grid), 3)
    sq = np.asarray(results, dtype=np.float64)
    m = cfg.replicas
    mse = sq[:, :, 0].mean(axis=0)
    stderr = sq[:, :, 0].std(axis=0, ddof=1) / np.sqrt(m)
    pi_mse = sq[:, :, 1].mean(axis=0)
    half_mse = sq[:, :, 2].mean(axis=0)
    if np.any(mse <= 0):
        raise ValueError("zero MSE; the reference and the filter coincide")
    weights = (mse / np.maximum(stderr, np.finfo(float).tiny)) ** 2
    slope, intercept, slope_err = fit_loglog_slope(zip(cfg.n_grid, mse, weights))
    lo, hi = cfg.slope_band
    checks = convergence_checks(slope, (lo, hi), mse)
    if writer is not None:
        for n, v in zip(cfg.n_grid, mse):
            writer.add_scalar("converge/mse", float(v), n)
        writer.add_scalar("converge/slope", slope, 0)
    print(" [*] slope {:.4f} +/- {:.4f} (predicted {:.2f}, band [{}, {}])".format(
        slope, slope_err, predicted_slope(cfg.epsilon), lo, hi))
    for name, ok in sorted(checks.items()):
        print(" [{}] {}".format("*" if ok else "!", name))
    return ConvergenceReport(cfg.epsilon, list(cfg.n_grid), mse.tolist(), stderr.tolist(),
                             pi_mse.tolist(), half_mse.tolist(), slope, intercept,
                             slope_err, predicted_slope(cfg.epsilon), (lo, hi), checks)


def frozen_observation(cfg, model):
    if cfg.observation is not None:
        return cfg.observation
    _, obs = simulate_paths(model, cfg.grid, cfg.master_seed, substream=0)
    return obs


def _clt_replica(cfg, obs, rho_ref, replica):
    model = cfg.build_model()
    phi = make_test_function(cfg.phi)
    record = [0, obs.grid.steps]
    values = []
    for n in cfg.n_grid:
        fcfg = FilterConfig(n, cfg.epsilon, cfg.beta, obs.grid)
        rng = replica_stream(cfg.master_seed, replica, substream=n, offset=cfg.stream_offset)
        traj = run_filter(fcfg, model, obs, [phi], rng, record_steps=record)
        values.append(float(rescaled_error(n, cfg.epsilon, traj.rho(phi.name)[-1], rho_ref)))
    return values


def summarize(samples):
    x = np.asarray(samples, dtype=np.float64)
    return {"mean": float(np.mean(x)),
            "var": float(np.var(x, ddof=1)),
            "skew": float(stats.skew(x)),
            "kurtosis": float(stats.kurtosis(x)),
            "ks_stat": ks_normal_distance(x)}


def run_clt_study(cfg, threads=1, writer=None):
    """Samples of U^n_T(phi) = n^epsilon (rho^n_T(phi) - rho_T(phi)) on one frozen
    observation path.

    For epsilon <= 1/2 the variances must stabilise (Var_n / Var_4n inside
    ``var_ratio_band``) and the largest n must look Gaussian; above 1/2 the
    variance of the first (n, 4n) pair must grow by ``divergence_ratio``.
    """
    model = cfg.build_model()
    phi = make_test_function(cfg.phi)
    obs = frozen_observation(cfg, model)
    if not cfg.grid.matches(obs.grid):
        raise ValueError("grid mismatch: study {} vs observation {}".format(cfg.grid, obs.grid))
    rho_ref = float(reference_values(cfg, model, obs, phi, [obs.grid.steps])[0][0])
    print(" [*] CLT study: {} replicas x n={} (epsilon={}) on observation {}".format(
        cfg.replicas, cfg.n_grid, cfg.epsilon, obs.content_hash()[:10]))
    results = _map_replicas(partial(_clt_replica, cfg, obs, rho_ref), cfg.replicas,
                            threads, "clt")
    u = np.asarray(results, dtype=np.float64)
    samples = {n: u[:, i] for i, n in enumerate(cfg.n_grid)}
    summary = {n: summarize(samples[n]) for n in cfg.n_grid}
    ratios = {"{}/{}".format(n, n4): summary[n]["var"] / summary[n4]["var"]
              for n, n4 in variance_pairs(cfg.n_grid)}
    crit = ks_critical_value(cfg.replicas, cfg.ks_level)
    checks = {}
    if cfg.epsilon <= 0.5:
        lo, hi = cfg.var_ratio_band
        checks["variance_stable"] = all(lo <= r <= hi for r in ratios.values())
        checks["ks_normal"] = summary[cfg.n_grid[-1]]["ks_stat"] <= cfg.ks_factor * crit
    else:
        n, n4 = variance_pairs(cfg.n_grid)[0]
        checks["variance_diverges"] = \
            summary[n4]["var"] / summary[n]["var"] >= cfg.divergence_ratio
    if writer is not None:
        for n in cfg.n_grid:
            writer.add_scalar("clt/var", summary[n]["var"], n)
            writer.add_scalar("clt/ks_stat", summary[n]["ks_stat"], n)
    for name, ok in sorted(checks.items()):
        print(" [{}] {}".format("*" if ok else "!", name))
    return CltReport(cfg.epsilon, list(cfg.n_grid), samples, summary, ratios, crit,
                     obs.content_hash(), rho_ref, checks)


def residual_report(model, obs, phi, n_grid, epsilon, beta, master_seed, stream_offset=0):
    """Zakai defect and variance gap of the filter for every n.

    For linear models the exact reference's own defect is included, which
    only reflects the time discretisation.
    """
    functionals = zakai_functionals(model, phi)
    phi2_sup = float(np.max(np.abs(phi.derivative(2, PROBE))))
    rows = []
    for n in n_grid:
        cfg = FilterConfig(n, epsilon, beta, obs.grid)
        rng = replica_stream(master_seed, 0, substream=n, offset=stream_offset)
        traj = run_filter(cfg, model, obs, functionals, rng)
        rows.append({"n": int(n),
                     "residual": zakai_residual(traj, phi, model, obs),
                     "variance_gap": variance_contribution_gap(traj.final_state, phi),
                     "gap_bound": variance_gap_bound(cfg, model, phi2_sup)})
        print(" [*] n={} residual={:.6g}".format(n, rows[-1]["residual"]))
    report = {"rows": rows}
    gaps = [(r["n"], r["variance_gap"]) for r in rows if r["variance_gap"] > 0]
    if len(gaps) >= 2:
        report["gap_slope"] = fit_loglog_slope(gaps)[0]
    if model.is_linear:
        ref = reference_trajectory(model, obs, functionals)
        report["oracle_residual"] = zakai_residual(ref, phi, model, obs)
    return report


def _dump_json(path, obj):
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def write_convergence_report(out_dir, tag, report):
    os.makedirs(out_dir, exist_ok=True)
    n = np.asarray(report.n_grid, dtype=np.float64)
    mse = np.asarray(report.mse)
    data = np.column_stack([n, mse, report.mse_stderr, np.log(n), np.log(mse)])
    csv_path = join(out_dir, "convergence_{}.csv".format(tag))
    np.savetxt(csv_path, data, fmt=_CSV_FMT, delimiter=",",
               header="n,mse,stderr,log_n,log_mse", comments="")
    _dump_json(join(out_dir, "convergence_{}.json".format(tag)), report.to_dict())
    return csv_path


def write_clt_report(out_dir, tag, report):
    os.makedirs(out_dir, exist_ok=True)
    rows = [(n, r, u) for n in report.n_grid for r, u in enumerate(report.samples[n])]
    csv_path = join(out_dir, "clt_{}.csv".format(tag))
    np.savetxt(csv_path, np.asarray(rows, dtype=np.float64), fmt=_CSV_FMT, delimiter=",",
               header="n,replica,U_value", comments="")
    _dump_json(join(out_dir, "clt_{}.json".format(tag)), report.to_dict())
    return csv_path


def write_residual_report(out_dir, tag, report):
    os.makedirs(out_dir, exist_ok=True)
    keys = ["n", "residual", "variance_gap", "gap_bound"]
    data = np.asarray([[row[k] for k in keys] for row in report["rows"]], dtype=np.float64)
    csv_path = join(out_dir, "residual_{}.csv".format(tag))
    np.savetxt(csv_path, data, fmt=_CSV_FMT, delimiter=",", header=",".join(keys),
               comments="")
    _dump_json(join(out_dir, "residual_{}.json".format(tag)), report)
    return csv_path


def write_manifest(out_dir, command, tag, hparams, inputs=None):
    """Resolved config, seed and input hashes; enough to rerun byte-for-byte."""
    os.makedirs(out_dir, exist_ok=True)
    path = join(out_dir, "manifest_{}_{}.json".format(command, tag))
    _dump_json(path, {"command": command,
                      "version": __version__,
                      "master_seed": hparams.master_seed,
                      "config": hparams.values(),
                      "inputs": inputs or {}})
    return path
