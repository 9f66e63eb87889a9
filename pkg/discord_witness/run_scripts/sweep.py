"""Parameter sweeps over the one-parameter state families, written as CSV."""
import logging
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List

import numpy as np
import polars as pl

mpi_exists = False
try:
    from mpi4py import MPI
    from mpi4py.futures import MPICommExecutor
    mpi_exists = True
except ImportError:
    logging.debug("No MPI available on system.")

from discord_witness.postprocessing.discord import discord_qubit_A
from discord_witness.preprocessing.states import family_state
from discord_witness.run_scripts.evaluation import METHODS, evaluate_state

SWEEP_SCHEMA = {
    "parameter": pl.Float64,
    "method": pl.Utf8,
    "value": pl.Float64,
    "sx1": pl.Float64,
    "sx2": pl.Float64,
    "stderr": pl.Float64,
    "discord": pl.Float64,
}


def parameter_grid(start: float, stop: float, step: float) -> np.ndarray:
    """start, start + step, ... up to stop inclusive."""
    if step <= 0 or stop < start:
        raise ValueError(f"Empty parameter range start={start}, stop={stop}, step={step}")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


def _point_seed(seed: int | None, index: int) -> int | None:
    if seed is None:
        return None
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def sweep_point(family: str, index: int, parameter: float, methods: List[str], config: dict,
                shots: int | None = None, seed: int | None = None, with_discord: bool = False) -> List[dict]:
    state = family_state(family, float(parameter))
    discord = None
    if with_discord:
        discord = discord_qubit_A(state, grid=config["discord"]["grid"],
                                  refine_steps=config["discord"]["refine_steps"]).value
    rows = []
    for method in methods:
        record = evaluate_state(state, method, {"family": family, "p": float(parameter)}, config,
                                shots=shots, seed=_point_seed(seed, index))
        rows.append({
            "parameter": float(parameter),
            "method": method,
            "value": record.value,
            "sx1": record.auxiliary.get("sx1"),
            "sx2": record.auxiliary.get("sx2"),
            "stderr": record.auxiliary.get("stderr"),
            "discord": discord,
        })
    return rows


def run_sweep(family: str, parameters, methods: List[str], config: dict, shots: int | None = None,
              seed: int | None = None, with_discord: bool = False,
              multiprocessor: str | None = None) -> pl.DataFrame | None:
    """Evaluate every (parameter, method) pair; rows come back ordered by parameter."""
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"Unknown methods {unknown}, choose from {METHODS}")
    if not len(parameters):
        raise ValueError("Sweep needs at least one parameter value")
    kwargs = dict(methods=methods, config=config, shots=shots, seed=seed, with_discord=with_discord)

    if multiprocessor:
        if multiprocessor == "mpi" and mpi_exists:
            executor = MPICommExecutor(MPI.COMM_WORLD, root=0)
            logging.info(f"🚀 Using MPI executor with {MPI.COMM_WORLD.Get_size()} processes")
        else:  # "cf" case
            max_workers = multiprocessing.cpu_count()
            executor = ProcessPoolExecutor(max_workers=max_workers)
            logging.info(f"🖥️  Using ProcessPoolExecutor with {max_workers} workers")
        with executor as ex:
            if ex is None:
                # MPI worker rank, the root collects the rows
                return None
            futures = [ex.submit(sweep_point, family, i, p, **kwargs) for i, p in enumerate(parameters)]
            results = [fut.result() for fut in futures]
    else:
        logging.info("🔧 Using single process executor")
        results = [sweep_point(family, i, p, **kwargs) for i, p in enumerate(parameters)]

    rows = [row for point in results for row in point]
    logging.info(f"✅ Finished {family} sweep over {len(parameters)} parameters and {len(methods)} methods")
    return pl.from_dicts(rows, schema=SWEEP_SCHEMA)


def write_sweep_csv(table: pl.DataFrame, path: str | Path) -> Path:
    path = Path(os.path.expanduser(path))
    if not path.parent.exists():
        os.makedirs(path.parent)
    table.write_csv(path)
    logging.info(f"💾 Wrote {table.height} sweep rows to {path}")
    return path
