# coding: utf-8
"""
Gaussian mixture particle filter: simulation, filtering and studies.

usage: gmix (simulate|filter|converge|clt|residual) [--config=<path>] [--set=<kv>]...
            [--out=<dir>] [--threads=<k>] [--seed=<u64>] [--log-event-path=<dir>]
       gmix -h | --help

commands:
    simulate                 Write a signal and an observation path as CSV.
    filter                   Run one filter (largest n of n_grid) and write its trajectory.
    converge                 MSE rate study across n_grid.
    clt                      Fluctuation study of the recalibrated error on one observation path.
    residual                 Zakai defect and variance gap across n_grid.

options:
    --config=<path>          JSON configuration (see dump_hparams_to_json.py).
    --set=<kv>               Override one key, e.g. --set epsilon=0.25. Repeatable.
    --out=<dir>              Output directory, overrides output_dir.
    --threads=<k>            Worker processes for the studies. Defaults to the cpu count.
    --seed=<u64>             Master seed. Falls back to $GMIX_SEED, then to the config.
    --log-event-path=<dir>   Write study scalars for tensorboard to this directory.
    -h, --help               Show this help message and exit.

Exit status is 0 on success, 2 when a study ran but its acceptance check
failed, and 1 on any error.
"""
import os
import sys
from multiprocessing import cpu_count
from os.path import exists, join

from docopt import docopt

from gaussmix_filter import experiments
from gaussmix_filter.filter_core import FilterConfig, recording_steps, run_filter
from gaussmix_filter.hparams import default_hparams, hparams_debug_string
from gaussmix_filter.models import make_builtin_model, make_test_function
from gaussmix_filter.paths import (
    TimeGrid, read_observation_csv, replica_stream, simulate_paths, write_observation_csv,
    write_signal_csv)

SEED_ENV = "GMIX_SEED"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED_CHECK = 2


def load_hparams(config_path=None, overrides=(), seed=None, out_dir=None):
    """Defaults, then the config file, then $GMIX_SEED, then overrides and flags.

    Raises:
        ValueError: For a missing or malformed config file and unknown keys.
    """
    hparams = default_hparams()
    if config_path is not None:
        if not exists(config_path):
            raise ValueError("config file not found: {}".format(config_path))
        with open(config_path) as f:
            hparams.parse_json(f.read())
    env_seed = os.environ.get(SEED_ENV)
    if env_seed:
        hparams.set_hparam("master_seed", _parse_seed(env_seed, SEED_ENV))
    hparams.parse_overrides(overrides)
    if seed is not None:
        hparams.set_hparam("master_seed", _parse_seed(seed, "--seed"))
    if out_dir is not None:
        hparams.set_hparam("output_dir", out_dir)
    return hparams


def _parse_seed(value, source):
    try:
        seed = int(value, 0)
    except ValueError:
        raise ValueError("{}: not an integer seed: {}".format(source, value))
    if not 0 <= seed < 2 ** 64:
        raise ValueError("{}: seed must be an unsigned 64-bit integer".format(source))
    return seed


def _model(hparams):
    return make_builtin_model(hparams.model, **experiments.model_params(hparams))


def _grid(hparams):
    return TimeGrid(hparams.dt, hparams.T, hparams.delta)


def _observation(hparams, model):
    """Observation from observation_path, or simulated from master_seed."""
    if hparams.observation_path:
        obs = read_observation_csv(hparams.observation_path, hparams.delta)
        print(" [*] Loaded observation {}".format(hparams.observation_path))
        return obs
    _, obs = simulate_paths(model, _grid(hparams), hparams.master_seed)
    return obs


def cmd_simulate(hparams, args, writer=None):
    model = _model(hparams)
    signal, obs = simulate_paths(model, _grid(hparams), hparams.master_seed)
    out_dir = hparams.output_dir
    tag = experiments.default_tag(hparams)
    os.makedirs(out_dir, exist_ok=True)
    write_signal_csv(join(out_dir, "signal_{}.csv".format(tag)), signal)
    obs_path = join(out_dir, "observation_{}.csv".format(tag))
    write_observation_csv(obs_path, obs)
    print(" [*] Wrote {}".format(obs_path))
    experiments.write_manifest(out_dir, "simulate", tag, hparams,
                               {"observation": obs.content_hash()})
    return EXIT_OK


def cmd_filter(hparams, args, writer=None):
    model = _model(hparams)
    obs = _observation(hparams, model)
    phi = make_test_function(hparams.phi)
    n = hparams.n_grid[-1]
    cfg = FilterConfig(n, hparams.epsilon, hparams.beta, obs.grid)
    rng = replica_stream(hparams.master_seed, 0, substream=n, offset=hparams.stream_offset)
    traj = run_filter(cfg, model, obs, [phi], rng,
                      record_steps=recording_steps(obs.grid, hparams.record_stride))
    out_dir = hparams.output_dir
    tag = experiments.default_tag(hparams)
    os.makedirs(out_dir, exist_ok=True)
    path = join(out_dir, "trajectory_{}.csv".format(tag))
    traj.to_csv(path)
    traj.corrections_to_csv(join(out_dir, "corrections_{}.csv".format(tag)))
    print(" [*] n={} alpha={:.4g}: pi_T({})={:.6g}, rho_T(1)={:.6g}".format(
        n, cfg.alpha, phi.name, traj.pi(phi.name)[-1], traj.rho_one[-1]))
    print(" [*] Wrote {}".format(path))
    experiments.write_manifest(out_dir, "filter", tag, hparams,
                               {"observation": obs.content_hash()})
    return EXIT_OK


def cmd_converge(hparams, args, writer=None):
    out_dir = hparams.output_dir
    cfg = experiments.ConvergenceStudyConfig.from_hparams(
        hparams, cache_dir=join(out_dir, "oracle_cache"))
    report = experiments.run_convergence_study(cfg, threads=args["threads"], writer=writer)
    tag = experiments.default_tag(hparams)
    experiments.write_convergence_report(out_dir, tag, report)
    experiments.write_manifest(out_dir, "converge", tag, hparams)
    return EXIT_OK if report.passed else EXIT_FAILED_CHECK


def cmd_clt(hparams, args, writer=None):
    out_dir = hparams.output_dir
    obs = None
    if hparams.observation_path:
        obs = read_observation_csv(hparams.observation_path, hparams.delta)
    cfg = experiments.CltStudyConfig.from_hparams(
        hparams, cache_dir=join(out_dir, "oracle_cache"), observation=obs)
    report = experiments.run_clt_study(cfg, threads=args["threads"], writer=writer)
    tag = experiments.default_tag(hparams)
    experiments.write_clt_report(out_dir, tag, report)
    experiments.write_manifest(out_dir, "clt", tag, hparams,
                               {"observation": report.observation_hash})
    return EXIT_OK if report.passed else EXIT_FAILED_CHECK


def cmd_residual(hparams, args, writer=None):
    model = _model(hparams)
    obs = _observation(hparams, model)
    phi = make_test_function(hparams.phi)
    report = experiments.residual_report(model, obs, phi, hparams.n_grid, hparams.epsilon,
                                         hparams.beta, hparams.master_seed,
                                         hparams.stream_offset)
    out_dir = hparams.output_dir
    tag = experiments.default_tag(hparams)
    experiments.write_residual_report(out_dir, tag, report)
    experiments.write_manifest(out_dir, "residual", tag, hparams,
                               {"observation": obs.content_hash()})
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "filter": cmd_filter,
    "converge": cmd_converge,
    "clt": cmd_clt,
    "residual": cmd_residual,
}

STUDIES = ("converge", "clt")


def _summary_writer(log_event_path):
    if log_event_path is None:
        return None
    from tensorboardX import SummaryWriter
    print("Log event path: {}".format(log_event_path))
    return SummaryWriter(log_event_path)


def main(argv=None):
    args = docopt(__doc__, argv=argv)
    command = next(name for name in COMMANDS if args[name])
    writer = None
    try:
        hparams = load_hparams(args["--config"], args["--set"], args["--seed"], args["--out"])
        experiments.validate_hparams(hparams, study=command in STUDIES)
        threads = args["--threads"]
        threads = cpu_count() if threads is None else int(threads)
        if threads < 1:
            raise ValueError("--threads must be >= 1, got {}".format(threads))
        print(hparams_debug_string(hparams))
        writer = _summary_writer(args["--log-event-path"])
        return COMMANDS[command](hparams, {"threads": threads}, writer=writer)
    except (ValueError, RuntimeError, OSError) as e:
        print(" [!] {}".format(e), file=sys.stderr)
        return EXIT_ERROR
    finally:
        if writer is not None:
            writer.close()


if __name__ == "__main__":
    sys.exit(main())
