### Reader/writer for the JSON state file:
###   {"dims": [dA, dB], "matrix": [[[re, im], ...], ...]}
### rows are A-major composite indices, complex entries are [re, im] pairs.

import json
import logging
import os
from pathlib import Path

import numpy as np

from discord_witness.preprocessing.states import BipartiteState


def state_to_dict(state: BipartiteState) -> dict:
    # float() keeps the shortest round-trip repr, so doubles survive exactly
    return {
        "dims": [int(state.dA), int(state.dB)],
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in state.rho],
    }


def state_from_dict(data: dict, strict: bool = True) -> BipartiteState:
    if not isinstance(data, dict) or "dims" not in data or "matrix" not in data:
        raise ValueError("State file must be a JSON object with 'dims' and 'matrix' keys")
    dims = data["dims"]
    if len(dims) != 2 or not all(isinstance(d, int) and d > 0 for d in dims):
        raise ValueError(f"'dims' must be two positive integers, got {dims}")
    entries = np.asarray(data["matrix"], dtype=np.float64)
    if entries.ndim != 3 or entries.shape[2] != 2:
        raise ValueError(f"'matrix' must be a square array of [re, im] pairs, got shape {entries.shape}")
    rho = entries[..., 0] + 1j * entries[..., 1]
    return BipartiteState(dims[0], dims[1], rho, strict=strict)


def write_state(state: BipartiteState, path: str | Path) -> Path:
    path = Path(os.path.expanduser(path))
    if path.parent and not path.parent.exists():
        os.makedirs(path.parent)
    with open(path, "w") as fp:
        json.dump(state_to_dict(state), fp)
        fp.write("\n")
    logging.info(f"💾 Wrote {state.dA}x{state.dB} state to {path}")
    return path


def read_state(path: str | Path, strict: bool = True) -> BipartiteState:
    path = Path(os.path.expanduser(path))
    if not path.exists():
        raise FileNotFoundError(f"State file {path} doesn't exist.")
    with open(path, "r") as fp:
        data = json.load(fp)
    state = state_from_dict(data, strict=strict)
    logging.info(f"✅ Loaded {state.dA}x{state.dB} state from {path}")
    return state
