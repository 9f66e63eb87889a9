"""Statevector simulation of the two-ancilla witness circuit.

Two ancillas start in |+>; ancilla a controls U_a on four copies of the
state, with U_1 = X_A V^B_12 V^B_34 and U_2 = X_A V^B_13 V^B_24. Measuring
sigma_x on both ancillas gives Tr(W rho^(x)4) = <sigma_x^2> - <sigma_x^1>.

The mixed input rho^(x)4 is handled as the ensemble of its pure product
eigen-terms (at most rank^4 of them), never as a register density matrix.
Register layout: (ancilla 1, ancilla 2, A1, B1, A2, B2, A3, B3, A4, B4).
"""
from dataclasses import dataclass
from itertools import product
from typing import Sequence, Tuple
import logging

import numpy as np

from discord_witness.preprocessing.states import BipartiteState
from discord_witness.utils.matrix_core import eig_hermitian
from discord_witness.witness.permutations import ARITY, PermutationSpec, permute_factors
from discord_witness.witness.witness import DENSE_MAX_DIM, check_dense_budget, gate_specs

WEIGHT_CUTOFF = 1e-14
GATE_ORDER = (1, 2)
BATCH_SIZE = 256

PLUS = np.array([1, 1], dtype=np.complex128) / np.sqrt(2)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


@dataclass(frozen=True)
class CircuitReadout:
    sx1: float
    sx2: float
    witness: float
    shots: int | None = None
    stderr1: float | None = None
    stderr2: float | None = None
    dropped_mass: float = 0.0

    @property
    def stderr(self) -> float | None:
        """Combined standard error of the witness estimate, stderr1 + stderr2."""
        if self.stderr1 is None or self.stderr2 is None:
            return None
        return self.stderr1 + self.stderr2


def _register_shape(dA: int, dB: int, batch: int | None = None) -> Tuple[int, ...]:
    shape = (2, 2) + (dA, dB) * ARITY
    return shape if batch is None else (batch,) + shape


def apply_controlled_permutation(register: np.ndarray, ancilla: int, u: PermutationSpec,
                                 dA: int, dB: int) -> np.ndarray:
    """Apply [0]_a (x) I + [1]_a (x) U to a register vector.

    ``register`` has length 4 * (dA*dB)^4, or shape (batch, 4 * (dA*dB)^4).
    """
    if ancilla not in (1, 2):
        raise ValueError(f"ancilla must be 1 or 2, got {ancilla}")
    register = np.asarray(register, dtype=np.complex128)
    batched = register.ndim == 2
    size = 4 * (dA * dB) ** ARITY
    if register.shape[-1] != size:
        raise ValueError(f"Register of length {register.shape[-1]} does not match 4*({dA}*{dB})^4 = {size}")
    lead = 1 if batched else 0
    t = register.reshape(_register_shape(dA, dB, register.shape[0] if batched else None))
    out = t.copy()
    sl = [slice(None)] * t.ndim
    sl[lead + ancilla - 1] = 1
    sl = tuple(sl)
    # the selected slice drops the ancilla axis, so system axes start one earlier
    out[sl] = permute_factors(t[sl], u.interleaved(), first_axis=lead + 1)
    return out.reshape(register.shape)


def _ensemble(state: BipartiteState, weight_cutoff: float):
    """Pure product terms of rho^(x)4 with weight >= cutoff, plus the dropped mass."""
    w, v = eig_hermitian(state.rho)
    w = np.clip(w, 0.0, None)
    keep = w > 0
    w, v = w[keep], v[:, keep]
    terms, weights = [], []
    dropped = 0.0
    for idx in product(range(len(w)), repeat=ARITY):
        weight = float(np.prod(w[list(idx)]))
        if weight < weight_cutoff:
            dropped += weight
            continue
        terms.append(idx)
        weights.append(weight)
    return v, terms, np.asarray(weights), dropped


def _initial_registers(vecs: np.ndarray, terms: Sequence[Tuple[int, ...]]) -> np.ndarray:
    batch = []
    ancillas = np.kron(PLUS, PLUS)
    for idx in terms:
        psi = ancillas
        for k in idx:
            psi = np.kron(psi, vecs[:, k])
        batch.append(psi)
    return np.stack(batch)


def _run_gates(registers: np.ndarray, state: BipartiteState, gates: Sequence[int]) -> np.ndarray:
    specs = dict(zip((1, 2), gate_specs()))
    for a in gates:
        registers = apply_controlled_permutation(registers, a, specs[a], state.dA, state.dB)
    return registers


def _sigma_x(registers: np.ndarray, ancilla: int) -> np.ndarray:
    """Per-register <sigma_x> of the given ancilla."""
    t = registers.reshape(len(registers), 2, 2, -1)
    if ancilla == 1:
        overlap = np.sum(t[:, 0].conj() * t[:, 1], axis=(1, 2))
    else:
        overlap = np.sum(t[:, :, 0].conj() * t[:, :, 1], axis=(1, 2))
    return 2.0 * overlap.real


def _joint_x_probs(registers: np.ndarray) -> np.ndarray:
    """Per-register probabilities of the sigma_x (x) sigma_x outcomes (++, +-, -+, --)."""
    t = registers.reshape(len(registers), 2, 2, -1)
    t = np.einsum("ac,bd,ncdr->nabr", HADAMARD, HADAMARD, t)
    probs = np.sum(np.abs(t) ** 2, axis=3).reshape(len(registers), 4)
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum(axis=1, keepdims=True)


def _evolve_in_batches(state, vecs, terms, gates, reducer):
    out = []
    for start in range(0, len(terms), BATCH_SIZE):
        regs = _initial_registers(vecs, terms[start:start + BATCH_SIZE])
        out.append(reducer(_run_gates(regs, state, gates)))
    return np.concatenate(out)


def simulate_exact(state: BipartiteState, weight_cutoff: float = WEIGHT_CUTOFF,
                   gates: Sequence[int] = GATE_ORDER, max_dim: int = DENSE_MAX_DIM) -> CircuitReadout:
    """Exact ancilla expectations from the weighted eigen-ensemble of rho^(x)4.

    ``gates`` fixes which controlled gates run and in what order; an ancilla
    whose gate is omitted stays in |+> and reads <sigma_x> = 1.
    """
    check_dense_budget(state.dA, state.dB, max_dim)
    vecs, terms, weights, dropped = _ensemble(state, weight_cutoff)
    logging.debug(f"Circuit ensemble: {len(terms)} terms, dropped mass {dropped:.2e}")

    def reducer(regs):
        return np.stack([_sigma_x(regs, 1), _sigma_x(regs, 2)], axis=1)

    sx = _evolve_in_batches(state, vecs, terms, gates, reducer)
    sx1, sx2 = (float(np.dot(weights, sx[:, a])) for a in (0, 1))
    return CircuitReadout(sx1=sx1, sx2=sx2, witness=sx2 - sx1, dropped_mass=dropped)


def ancilla_density(state: BipartiteState, ancilla: int, gates: Sequence[int] = GATE_ORDER,
                    weight_cutoff: float = WEIGHT_CUTOFF, max_dim: int = DENSE_MAX_DIM) -> np.ndarray:
    """Reduced 2x2 density matrix of one ancilla after the given gates."""
    if ancilla not in (1, 2):
        raise ValueError(f"ancilla must be 1 or 2, got {ancilla}")
    check_dense_budget(state.dA, state.dB, max_dim)
    vecs, terms, weights, _ = _ensemble(state, weight_cutoff)

    def reducer(regs):
        t = regs.reshape(len(regs), 2, 2, -1)
        sub = "nirs,njrs->nij" if ancilla == 1 else "nris,nrjs->nij"
        return np.einsum(sub, t, t.conj())

    rhos = _evolve_in_batches(state, vecs, terms, gates, reducer)
    return np.einsum("n,nij->ij", weights, rhos)


def sample_shots(state: BipartiteState, shots: int, seed=None, weight_cutoff: float = WEIGHT_CUTOFF,
                 gates: Sequence[int] = GATE_ORDER, max_dim: int = DENSE_MAX_DIM) -> CircuitReadout:
    """Finite-shot estimate of both ancilla expectations.

    Each shot draws a pure product term of rho^(x)4 and reads both ancillas in
    the sigma_x (x) sigma_x basis. Shots are grouped: term counts come from a
    multinomial over the ensemble weights, outcome counts per term from a
    multinomial over that term's four joint outcome probabilities. This has the
    same distribution as drawing shot by shot and is reproducible for a seed.
    """
    if shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots}")
    check_dense_budget(state.dA, state.dB, max_dim)
    rng = np.random.default_rng(seed)
    vecs, terms, weights, dropped = _ensemble(state, weight_cutoff)
    probs = _evolve_in_batches(state, vecs, terms, gates, _joint_x_probs)

    term_counts = rng.multinomial(shots, weights / weights.sum())
    outcome_counts = np.zeros(4, dtype=np.int64)
    for n, p in zip(term_counts, probs):
        if n:
            outcome_counts += rng.multinomial(n, p)
    # outcome order (++, +-, -+, --): first label ancilla 1, second ancilla 2
    n_pp, n_pm, n_mp, n_mm = outcome_counts
    sx1 = float(n_pp + n_pm - n_mp - n_mm) / shots
    sx2 = float(n_pp + n_mp - n_pm - n_mm) / shots
    stderr1 = float(np.sqrt(max(1.0 - sx1 ** 2, 0.0) / shots))
    stderr2 = float(np.sqrt(max(1.0 - sx2 ** 2, 0.0) / shots))
    logging.debug(f"Sampled {shots} shots over {len(terms)} ensemble terms")
    return CircuitReadout(sx1=sx1, sx2=sx2, witness=sx2 - sx1, shots=shots,
                          stderr1=stderr1, stderr2=stderr2, dropped_mass=dropped)
