"""Experiment configuration documents for CLI and config tests"""

AD_HALF_CONFIG = {
    "cell": {"type": "ad", "gamma0": 0.0, "gamma1": 0.5, "prior_p": 0.5},
    "probe": {"bloch": [0.0, 0.0, -1.0]},
    "source_model": "induced_from_iid_x",
    "n": 2,
    "beta": 0.49,
    "target_rate": 0.5,
    "frozen_seed": 7,
    "rng_seed": 11,
    "trials": 40,
    "grid_per_axis": 5,
    "refine_iters": 20,
    "sweep_samples": 5,
    "verify_instances": 4,
}

ORTHOGONAL_CONFIG = {
    "cell": {"type": "ad", "gamma0": 0.0, "gamma1": 1.0, "prior_p": 0.5},
    "n": 1,
    "target_rate": 0.5,
    "z_threshold": 1.0,
    "trials": 25,
}

DEGENERATE_CONFIG = {
    "cell": {"type": "ad", "gamma0": 0.4, "gamma1": 0.4, "prior_p": 0.5},
    "n": 2,
    "grid_per_axis": 3,
    "refine_iters": 5,
    "sweep_samples": 2,
}

# Identity and bit-flip channels given as Kraus lists of [re, im] rows
KRAUS_CONFIG = {
    "cell": {
        "type": "kraus",
        "ops0": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]],
        "ops1": [[[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]],
        "prior_p": 0.5,
    },
    "probe": {"bloch": [0.0, 0.0, 1.0]},
    "n": 1,
}
