"""Bipartite density matrices: construction, validation and the test families.

Every stochastic constructor takes an explicit ``seed`` (an int, a
``np.random.Generator`` or None); there is no module-level RNG.
"""
from dataclasses import dataclass, field
from typing import List
import logging

import numpy as np
import scipy.linalg as la

from discord_witness.utils.matrix_core import (as_matrix, kron, partial_trace, hermiticity_defect,
                                               unitarity_defect, KEEP_A, KEEP_B)

STATE_TOL = 1e-10
PROB_TOL = 1e-12
BASIS_TOL = 1e-10


@dataclass(frozen=True)
class StateDiagnostics:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float

    @property
    def ok(self) -> bool:
        return (self.hermiticity_defect <= STATE_TOL
                and self.trace_defect <= STATE_TOL
                and self.min_eigenvalue >= -STATE_TOL)


def diagnose(rho) -> StateDiagnostics:
    """Measure the three density-matrix invariants of a square matrix."""
    rho = as_matrix(rho)
    herm = hermiticity_defect(rho)
    trace_defect = abs(np.trace(rho) - 1.0)
    # spectrum of the Hermitian part, so the report stays defined for perturbed input
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]) if rho.size else 0.0
    return StateDiagnostics(hermiticity_defect=herm, trace_defect=float(trace_defect), min_eigenvalue=min_eig)


@dataclass(eq=False)
class BipartiteState:
    """A dA x dB density matrix with A-major composite indexing.

    Construction checks the density invariants unless ``strict=False``,
    which is only meant for inspecting broken input with :func:`validate`.
    """
    dA: int
    dB: int
    rho: np.ndarray
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.dA < 1 or self.dB < 1:
            raise ValueError(f"Subsystem dimensions must be positive, got ({self.dA}, {self.dB})")
        self.rho = as_matrix(self.rho)
        dim = self.dA * self.dB
        if self.rho.shape != (dim, dim):
            raise ValueError(f"Density matrix shape {self.rho.shape} does not match dims ({self.dA}, {self.dB})")
        if self.strict:
            diag = diagnose(self.rho)
            if not diag.ok:
                raise ValueError(f"Not a valid density matrix: {diag}")

    @property
    def dim(self) -> int:
        return self.dA * self.dB

    def reduced(self, keep: str) -> np.ndarray:
        return partial_trace(self.rho, self.dA, self.dB, keep=keep)

    def swapped(self) -> "BipartiteState":
        """The same state with the roles of A and B exchanged."""
        t = self.rho.reshape(self.dA, self.dB, self.dA, self.dB).transpose(1, 0, 3, 2)
        return BipartiteState(self.dB, self.dA, t.reshape(self.dim, self.dim), strict=self.strict)

    def local_unitary(self, uA, uB) -> "BipartiteState":
        u = kron(uA, uB)
        return BipartiteState(self.dA, self.dB, u @ self.rho @ u.conj().T, strict=self.strict)

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


@dataclass(eq=False)
class CQSpec:
    """Classical-quantum decomposition sum_k p_k |k><k|_A (x) rho_k^B.

    ``basis`` holds the orthonormal vectors |k> as columns.
    """
    probs: np.ndarray
    basis: np.ndarray
    blocks: List[np.ndarray]

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        self.basis = as_matrix(self.basis)
        self.blocks = [as_matrix(b) for b in self.blocks]
        dA = len(self.probs)
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"Invalid CQ probabilities {self.probs}: must be nonnegative and sum to 1")
        if self.basis.shape != (dA, dA):
            raise ValueError(f"Basis shape {self.basis.shape} does not match {dA} probabilities")
        if unitarity_defect(self.basis) > BASIS_TOL:
            raise ValueError(f"Basis is not unitary (defect {unitarity_defect(self.basis):.3e})")
        if len(self.blocks) != dA:
            raise ValueError(f"Expected {dA} blocks, got {len(self.blocks)}")
        dB = self.blocks[0].shape[0]
        for k, block in enumerate(self.blocks):
            if block.shape != (dB, dB):
                raise ValueError(f"Block {k} has shape {block.shape}, expected ({dB}, {dB})")
            if not diagnose(block).ok:
                raise ValueError(f"Block {k} is not a valid density matrix: {diagnose(block)}")

    @property
    def dA(self) -> int:
        return len(self.probs)

    @property
    def dB(self) -> int:
        return self.blocks[0].shape[0]


def validate(state: BipartiteState) -> StateDiagnostics:
    return diagnose(state.rho)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(d: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Random density matrix G G^dagger / Tr(G G^dagger) with G a d x rank Ginibre matrix."""
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must satisfy 1 <= rank <= d={d}, got {rank}")
    rng = np.random.default_rng(seed)
    g = _ginibre(rng, d, rank)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    rng = np.random.default_rng(seed)
    q, r = la.qr(_ginibre(rng, d, d))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def random_state(dA: int, dB: int, rank: int | None = None, seed=None) -> BipartiteState:
    return BipartiteState(dA, dB, random_density(dA * dB, rank=rank, seed=seed))


def random_cq_spec(dA: int, dB: int, seed=None) -> CQSpec:
    """Random CQ decomposition: Haar basis, flat Dirichlet weights, Ginibre blocks."""
    rng = np.random.default_rng(seed)
    basis = haar_unitary(dA, seed=rng)
    probs = rng.dirichlet(np.ones(dA))
    blocks = [random_density(dB, seed=rng) for _ in range(dA)]
    return CQSpec(probs=probs, basis=basis, blocks=blocks)


def assemble_cq(spec: CQSpec) -> BipartiteState:
    rho = np.zeros((spec.dA * spec.dB,) * 2, dtype=np.complex128)
    for p, k, block in zip(spec.probs, spec.basis.T, spec.blocks):
        rho += p * kron(np.outer(k, k.conj()), block)
    return BipartiteState(spec.dA, spec.dB, rho)


def product_state(rhoA, rhoB) -> BipartiteState:
    rhoA, rhoB = as_matrix(rhoA), as_matrix(rhoB)
    return BipartiteState(rhoA.shape[0], rhoB.shape[0], kron(rhoA, rhoB))


def maximally_mixed(dA: int, dB: int) -> BipartiteState:
    return BipartiteState(dA, dB, np.eye(dA * dB, dtype=np.complex128) / (dA * dB))


def _phi_plus() -> np.ndarray:
    psi = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)
    return np.outer(psi, psi.conj())


def bell_state() -> BipartiteState:
    """|Phi+><Phi+| with |Phi+> = (|00> + |11>)/sqrt(2)."""
    return BipartiteState(2, 2, _phi_plus())


def werner_family(p: float) -> BipartiteState:
    """p |Phi+><Phi+| + (1 - p) I/4."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner parameter p must lie in [0, 1], got {p}")
    return BipartiteState(2, 2, p * _phi_plus() + (1 - p) * np.eye(4) / 4)


def classical_mixture_family(p: float) -> BipartiteState:
    """p |Phi+><Phi+| + (1 - p)(|00><00| + |11><11|)/2.

    At p = 0 the state is classically correlated (zero discord), at p = 1 it is
    the Bell state.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Mixture parameter p must lie in [0, 1], got {p}")
    classical = np.diag([0.5, 0, 0, 0.5]).astype(np.complex128)
    return BipartiteState(2, 2, p * _phi_plus() + (1 - p) * classical)


def reduced_density(state: BipartiteState, keep: str = KEEP_A) -> np.ndarray:
    if keep not in (KEEP_A, KEEP_B):
        raise ValueError(f"keep must be '{KEEP_A}' or '{KEEP_B}', got {keep!r}")
    return state.reduced(keep)


FAMILIES = {
    "werner": werner_family,
    "mixture": classical_mixture_family,
}


def family_state(family: str, p: float) -> BipartiteState:
    if family not in FAMILIES:
        raise ValueError(f"Unknown one-parameter family {family!r}, choose from {sorted(FAMILIES)}")
    logging.debug(f"Building {family} state at p={p}")
    return FAMILIES[family](p)
