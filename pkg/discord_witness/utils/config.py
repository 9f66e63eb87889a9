import copy
import logging
import os

import yaml

# mirrors config/witness_defaults.yaml
DEFAULT_CONFIG = {
    "witness": {"threshold": 1e-9, "dense_max_dim": 6},
    "circuit": {"weight_cutoff": 1e-14},
    "discord": {"grid": 64, "refine_steps": 200, "zero_tol": 1e-5},
    "reconstruct": {"tol": 1e-8, "max_retries": 8},
    "sweep": {"multiprocessor": None},
}


def _merge(base: dict, override: dict) -> dict:
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def load_config(path: str | None = None) -> dict:
    """Built-in defaults, overridden by the YAML file at ``path`` if given."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is None:
        return config
    path = os.path.expanduser(path)
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file {path} doesn't exist.")
    with open(path, 'r') as file:
        user = yaml.safe_load(file) or {}
    unknown = set(user) - set(DEFAULT_CONFIG)
    assert not unknown, f"Unknown config sections {sorted(unknown)}, expected a subset of {sorted(DEFAULT_CONFIG)}"
    _merge(config, user)
    assert config["sweep"]["multiprocessor"] in [None, "cf", "mpi"], "sweep.multiprocessor must be null, 'cf' or 'mpi'"
    assert config["discord"]["grid"] >= 2, "discord.grid must be at least 2"
    logging.info(f"Loaded configuration from {path}")
    return config
