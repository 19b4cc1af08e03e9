from gaussmix_filter.tfcompat.hparam import HParams

# NOTE: Defaults reproduce the critical-epsilon rate study on the linear model.
# Presets under presets/ cover the other acceptance studies.


def default_hparams():
    """Default study configuration. A fresh container on every call."""
    return HParams(
        # Filtering model
        # [linear_ou, bounded_sine]
        # Definitions can be found at gaussmix_filter/models.py
        model="linear_ou",
        # linear_ou only: f(x) = -theta x, sigma(x) = sigma0, h(x) = gamma x
        **{"model.theta": 1.0,
           "model.sigma0": 1.0,
           "model.gamma": 1.0},

        # Test function the studies evaluate at T
        # [one, x, x2, sin, tanh, gauss]
        phi="x",

        # Gaussianity exponent, alpha = n^-epsilon. 0.5 is the optimal rate.
        epsilon=0.5,
        # Smoothing parameter: post-correction variance is alpha * beta
        beta=1.0,

        # Particle counts swept by the studies. Strictly increasing, >= 4 entries.
        n_grid=[50, 100, 200, 400, 800],
        # Monte Carlo replicas per n
        replicas=200,

        # Time grid: Euler step, correction interval, horizon.
        # delta must be a multiple of dt (dt <= delta / 10), T a multiple of delta.
        dt=1e-3,
        delta=0.05,
        T=1.0,

        master_seed=20240601,
        # Added to the particle stream ids of every replica. Changing it
        # redraws particle randomness but keeps every observation path.
        stream_offset=0,

        output_dir="results",
        # Report file tag. Empty: derived from model, phi and epsilon.
        tag="",

        # filter/residual: observation CSV written by `simulate`.
        # Empty: simulate a path from master_seed.
        observation_path="",
        # filter: record every k-th grid time (the terminal time is always kept)
        record_stride=1,

        # Bootstrap oracle for models without a closed-form posterior
        oracle_particles=1000000,
        oracle_seed=7,

        # Acceptance bands. A slope band without exactly two entries is derived
        # from epsilon (see experiments.slope_band).
        **{"converge.slope_band": [0.0],
           "clt.var_ratio_band": [0.4, 2.5],
           "clt.ks_factor": 1.5,
           "clt.ks_level": 0.01,
           "clt.divergence_ratio": 2.0},
    )


def hparams_debug_string(hparams):
    values = hparams.values()
    hp = ['  %s: %s' % (name, values[name]) for name in sorted(values)]
    return 'Hyperparameters:\n' + '\n'.join(hp)
