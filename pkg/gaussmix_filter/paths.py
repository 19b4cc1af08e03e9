# coding: utf-8
"""Signal and observation sample paths on a fixed time grid.

Randomness comes from :class:`RngStream`: a ``(master_seed, stream_id)``
pair, optionally refined by a ``substream`` index, mapped to an independent
numpy ``Generator`` through ``SeedSequence``. Stream ids in use:

- 0: signal
- 1: observation noise
- 2 + r: particle/resampling randomness of replica r
"""
import hashlib

import numpy as np

SIGNAL_STREAM = 0
OBSERVATION_STREAM = 1
REPLICA_STREAM_BASE = 2

_CSV_FMT = "%.17g"


class TimeGrid(object):
    """Equidistant grid on [0, T] with correction interval ``delta``.

    Raises:
        ValueError: If ``delta`` is not a multiple of ``dt``, ``T`` is not a
            multiple of ``delta``, or ``dt > delta / 10``.
    """

    def __init__(self, dt=1e-3, T=1.0, delta=0.05):
        if dt <= 0 or T <= 0 or delta <= 0:
            raise ValueError("dt, T and delta must be positive")
        m = _as_multiple(delta, dt)
        if m is None:
            raise ValueError("delta={} is not an integer multiple of dt={}".format(delta, dt))
        k = _as_multiple(T, delta)
        if k is None:
            raise ValueError("T={} is not an integer multiple of delta={}".format(T, delta))
        if m < 10:
            raise ValueError("dt={} must be <= delta/10 (delta={})".format(dt, delta))
        self.dt = float(dt)
        self.T = float(T)
        self.delta = float(delta)
        self.substeps_per_interval = m
        self.intervals = k
        self.steps = m * k

    @property
    def times(self):
        return np.arange(self.steps + 1) * self.dt

    def is_correction_step(self, step):
        return step > 0 and step % self.substeps_per_interval == 0

    def refined(self, factor):
        return TimeGrid(self.dt / factor, self.T, self.delta)

    def key(self):
        return (self.dt, self.T, self.delta)

    def matches(self, other):
        """Same steps and spacing, up to rounding from a CSV round trip."""
        return (self.steps == other.steps and
                self.substeps_per_interval == other.substeps_per_interval and
                np.allclose(self.key(), other.key(), rtol=1e-12, atol=0.0))

    def __repr__(self):
        return "TimeGrid(dt={}, T={}, delta={})".format(self.dt, self.T, self.delta)


def _as_multiple(big, small):
    ratio = big / small
    k = int(round(ratio))
    if k < 1 or abs(ratio - k) > 1e-9 * max(1.0, ratio):
        return None
    return k


class RngStream(object):
    """Reproducible random stream.

    Identical ``(master_seed, stream_id, substream)`` triples give identical
    sequences bit-for-bit; distinct triples give independent ones. Only the
    seeds are pickled, so streams travel to worker processes cheaply.
    """

    def __init__(self, master_seed, stream_id, substream=0, branch=()):
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        self.substream = int(substream)
        self.branch = tuple(int(b) for b in branch)
        self._gen = None

    @property
    def generator(self):
        if self._gen is None:
            seq = np.random.SeedSequence(
                entropy=self.master_seed,
                spawn_key=(self.stream_id, self.substream) + self.branch)
            self._gen = np.random.Generator(np.random.PCG64(seq))
        return self._gen

    def child(self, index):
        """Independent stream below this one, e.g. for the k-th of several sub-runs."""
        return RngStream(self.master_seed, self.stream_id, self.substream,
                         self.branch + (index,))

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)

    def multinomial(self, n, pvals):
        return self.generator.multinomial(n, pvals)

    def __getstate__(self):
        return (self.master_seed, self.stream_id, self.substream, self.branch)

    def __setstate__(self, state):
        self.master_seed, self.stream_id, self.substream, self.branch = state
        self._gen = None

    def __repr__(self):
        if self.branch:
            return "RngStream({}, {}, {}, branch={})".format(
                self.master_seed, self.stream_id, self.substream, self.branch)
        return "RngStream({}, {}, {})".format(self.master_seed, self.stream_id, self.substream)


class ZeroStream(RngStream):
    """Test hook: every normal draw is exactly zero."""

    def __init__(self):
        super(ZeroStream, self).__init__(0, 2 ** 63)

    def standard_normal(self, size=None):
        if size is None:
            return 0.0
        return np.zeros(size)


class SignalPath(object):
    def __init__(self, grid, values):
        values = np.asarray(values, dtype=np.float64)
        assert values.shape == (grid.steps + 1,)
        self.grid = grid
        self.values = values

    def coarsen(self, factor):
        return SignalPath(self.grid.refined(1.0 / factor), self.values[::factor])


class ObservationPath(object):
    """Observation increments ``dY`` and the cumulative path ``Y`` (``Y[0] = 0``).

    ``cumulative`` is always rebuilt from ``increments`` so that
    ``cumulative[k+1] - cumulative[k]`` reproduces the stored increment.
    """

    def __init__(self, grid, increments):
        increments = np.asarray(increments, dtype=np.float64)
        if increments.shape != (grid.steps,):
            raise ValueError("expected {} increments, got {}".format(
                grid.steps, increments.shape))
        self.grid = grid
        self.increments = increments
        self.cumulative = np.concatenate([[0.0], np.cumsum(increments)])

    def coarsen(self, factor):
        """Same Brownian path observed on a grid ``factor`` times coarser."""
        factor = int(factor)
        coarse = self.grid.refined(1.0 / factor)
        sums = self.increments.reshape(coarse.steps, factor).sum(axis=1)
        return ObservationPath(coarse, sums)

    def content_hash(self):
        sha = hashlib.sha1()
        sha.update(repr(self.grid.key()).encode("utf-8"))
        sha.update(np.ascontiguousarray(self.increments).tobytes())
        return sha.hexdigest()


def simulate_signal(model, grid, rng):
    """Euler-Maruyama path of ``dX = f(X)dt + sigma(X)dV``."""
    return SignalPath(grid, simulate_signal_ensemble(model, grid, rng, None))


def simulate_signal_ensemble(model, grid, rng, n_paths):
    """Vectorised Euler-Maruyama.

    Returns:
        numpy.ndarray: ``(n_paths, steps + 1)`` values, or ``(steps + 1,)``
        when ``n_paths`` is None.
    """
    shape = (grid.steps + 1,) if n_paths is None else (grid.steps + 1, n_paths)
    zeta = rng.standard_normal(shape)
    sqdt = np.sqrt(grid.dt)
    x = np.empty(shape)
    x[0] = model.initial_mean + model.initial_stddev * zeta[0]
    for k in range(grid.steps):
        xk = x[k]
        x[k + 1] = xk + model.drift(xk) * grid.dt + model.diffusion(xk) * sqdt * zeta[k + 1]
    return x if n_paths is None else x.T


def simulate_observation(model, signal, rng):
    """``dY[k] = h(X[k])dt + sqrt(dt) zeta_k`` on the signal's grid."""
    grid = signal.grid
    zeta = rng.standard_normal(grid.steps)
    dy = model.sensor(signal.values[:-1]) * grid.dt + np.sqrt(grid.dt) * zeta
    return ObservationPath(grid, dy)


def reference_observation(grid, rng):
    """Pure-noise increments: the observation law under the reference measure."""
    return ObservationPath(grid, np.sqrt(grid.dt) * rng.standard_normal(grid.steps))


def simulate_paths(model, grid, master_seed, substream=0):
    """Signal and observation drawn from their dedicated streams."""
    signal = simulate_signal(model, grid, RngStream(master_seed, SIGNAL_STREAM, substream))
    obs = simulate_observation(
        model, signal, RngStream(master_seed, OBSERVATION_STREAM, substream))
    return signal, obs


def replica_stream(master_seed, replica, substream=0, offset=0):
    return RngStream(master_seed, REPLICA_STREAM_BASE + offset + replica, substream)


def write_signal_csv(path, signal):
    data = np.column_stack([signal.grid.times, signal.values])
    np.savetxt(path, data, fmt=_CSV_FMT, delimiter=",", header="t,X", comments="")


def write_observation_csv(path, obs):
    # row k carries the increment ending at t_k; row 0 has dY = 0
    dy = np.concatenate([[0.0], obs.increments])
    data = np.column_stack([obs.grid.times, dy, obs.cumulative])
    np.savetxt(path, data, fmt=_CSV_FMT, delimiter=",", header="t,dY,Y", comments="")


def read_observation_csv(path, delta):
    """Load an observation CSV; ``delta`` is not stored in the file."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3 or data.shape[0] < 2:
        raise ValueError("{}: expected columns t,dY,Y".format(path))
    t = data[:, 0]
    grid = TimeGrid(dt=t[1] - t[0], T=t[-1], delta=delta)
    if grid.steps + 1 != len(t):
        raise ValueError("{}: time column does not match dt={}".format(path, grid.dt))
    return ObservationPath(grid, data[1:, 1])
