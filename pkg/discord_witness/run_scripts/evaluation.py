import json
import logging
from dataclasses import dataclass, field, asdict

from discord_witness.postprocessing.discord import discord_qubit_A
from discord_witness.preprocessing.states import BipartiteState
from discord_witness.witness.circuit import sample_shots, simulate_exact
from discord_witness.witness.witness import eval_commutator, eval_permutation

METHODS = ["commutator", "permutation", "circuit", "circuit-shots"]


@dataclass
class ResultRecord:
    """One witness evaluation: ``value`` is Tr(W rho^(x)4), ``indicator`` its negation."""
    state: dict
    method: str
    value: float
    zero_discord: bool
    auxiliary: dict = field(default_factory=dict)

    @property
    def indicator(self) -> float:
        return -self.value

    def to_dict(self) -> dict:
        out = asdict(self)
        out["indicator"] = self.indicator
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def evaluate_state(state: BipartiteState, method: str, descriptor: dict, config: dict,
                   shots: int | None = None, seed: int | None = None,
                   with_discord: bool = False) -> ResultRecord:
    threshold = config["witness"]["threshold"]
    max_dim = config["witness"]["dense_max_dim"]
    aux = {}
    if method == "commutator":
        value = eval_commutator(state)
        verdict = abs(value) <= threshold
    elif method == "permutation":
        value = eval_permutation(state, max_dim=max_dim)
        verdict = abs(value) <= threshold
    elif method == "circuit":
        readout = simulate_exact(state, weight_cutoff=config["circuit"]["weight_cutoff"], max_dim=max_dim)
        value = readout.witness
        aux.update(sx1=readout.sx1, sx2=readout.sx2, dropped_mass=readout.dropped_mass)
        verdict = abs(value) <= threshold
    elif method == "circuit-shots":
        if shots is None:
            raise ValueError("Method 'circuit-shots' needs --shots")
        readout = sample_shots(state, shots=shots, seed=seed,
                               weight_cutoff=config["circuit"]["weight_cutoff"], max_dim=max_dim)
        value = readout.witness
        aux.update(sx1=readout.sx1, sx2=readout.sx2, stderr=readout.stderr,
                   stderr1=readout.stderr1, stderr2=readout.stderr2, shots=shots, seed=seed)
        # a sampled estimate is compatible with zero within three standard errors
        verdict = abs(value) <= max(threshold, 3 * readout.stderr)
    else:
        raise ValueError(f"Unknown method {method!r}, choose from {METHODS}")

    if with_discord:
        if state.dA == 2:
            result = discord_qubit_A(state, grid=config["discord"]["grid"],
                                     refine_steps=config["discord"]["refine_steps"])
            aux["discord"] = result.value
            aux["discord_zero"] = result.value <= config["discord"]["zero_tol"]
        else:
            logging.warning(f"⚠️ Discord is only computed for dA = 2, skipping for dA={state.dA}")
    logging.info(f"Evaluated {descriptor} with {method}: {value:.6e}")
    return ResultRecord(state=descriptor, method=method, value=value, zero_discord=bool(verdict), auxiliary=aux)
