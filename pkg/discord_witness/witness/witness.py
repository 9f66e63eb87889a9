"""The four-copy discord witness

    W = 1/2 (X_A + X_A^dagger)(V^B_13 V^B_24 - V^B_12 V^B_34)

evaluated on rho^(x)4 by the commutator identity, by direct permutation
traces, or through an explicit dense operator.

Sign convention: expanding -1/2 Tr((i[A, B])^2) gives Tr((AB)^2) - Tr(A^2 B^2)
exactly, so the first term of the identity is read as Tr((rho_mu rho_nu)^2)
and Tr(W rho^(x)4) <= 0 for every state. The nonnegative pieces are the
individual Tr((i[rho_mu, rho_nu])^2); the total vanishes iff the state has
zero discord on A.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Tuple
import logging

import numpy as np

from discord_witness.preprocessing.loo import LOOBasis, default_basis, partial_expansion
from discord_witness.preprocessing.states import BipartiteState
from discord_witness.utils.matrix_core import hermiticity_defect, kron_all
from discord_witness.witness.permutations import (ARITY, CopyPermutation, PermutationSpec,
                                                  permutation_operator, permutation_trace)

DEFAULT_THRESHOLD = 1e-9
DENSE_MAX_DIM = 6  # (dA*dB)^4 <= 1296
OPERATOR_HERMITIAN_TOL = 1e-10

PATH_AUTO = "auto"
PATH_DENSE = "dense"
PATH_CONTRACTION = "contraction"


class DenseBudgetError(ValueError):
    """Raised when a dense four-copy object is requested above the dimension cap."""


def check_dense_budget(dA: int, dB: int, max_dim: int = DENSE_MAX_DIM):
    if dA * dB > max_dim:
        raise DenseBudgetError(
            f"Dense four-copy path needs dA*dB <= {max_dim}, got {dA}x{dB} = {dA * dB}")


def cyclic_x() -> CopyPermutation:
    return CopyPermutation.cyclic_shift(ARITY)


def v_pair(i: int, j: int, k: int, l: int) -> CopyPermutation:
    """V_ij V_kl on four copies."""
    return CopyPermutation.transposition(i, j) * CopyPermutation.transposition(k, l)


def gate_specs() -> Tuple[PermutationSpec, PermutationSpec]:
    """U_1 = X_A V^B_12 V^B_34 and U_2 = X_A V^B_13 V^B_24."""
    x = cyclic_x()
    return PermutationSpec(x, v_pair(1, 2, 3, 4)), PermutationSpec(x, v_pair(1, 3, 2, 4))


@dataclass(eq=False)
class WitnessOperator:
    """W as a signed sum of permutation terms, with an optional dense matrix."""
    dA: int
    dB: int
    terms: List[Tuple[float, PermutationSpec]]
    matrix: np.ndarray | None = field(default=None, repr=False)

    def expectation(self, state: BipartiteState) -> float:
        if (state.dA, state.dB) != (self.dA, self.dB):
            raise ValueError(f"Operator built for {self.dA}x{self.dB}, state is {state.dA}x{state.dB}")
        if self.matrix is not None:
            rho4 = kron_all(*([state.rho] * ARITY))
            return float(np.real(np.sum(self.matrix * rho4.T)))
        total = 0.0
        for coeff, spec in self.terms:
            total += coeff * permutation_trace(state.rho, self.dA, self.dB, spec).real
        return float(total)


def witness_terms() -> List[Tuple[float, PermutationSpec]]:
    u1, u2 = gate_specs()
    return [(0.5, u2), (0.5, u2.dagger()), (-0.5, u1), (-0.5, u1.dagger())]


def _grouped_to_interleaved() -> CopyPermutation:
    # factor order A1..A4 B1..B4 -> A1 B1 A2 B2 ...
    return CopyPermutation([2 * k for k in range(ARITY)] + [2 * k + 1 for k in range(ARITY)])


def x_from_swaps(dA: int) -> np.ndarray:
    """X_A assembled as the matrix product V_12 V_23 V_34."""
    dims = [dA] * ARITY
    v12, v23, v34 = (permutation_operator(CopyPermutation.transposition(i, i + 1), dims) for i in (1, 2, 3))
    return v12 @ v23 @ v34


def x_direct(dA: int) -> np.ndarray:
    """X_A from its definition sum |n1 n2 n3 n4><n2 n3 n4 n1|."""
    n = dA ** ARITY
    x = np.zeros((n, n), dtype=np.complex128)
    for idx in np.ndindex(*([dA] * ARITY)):
        n1, n2, n3, n4 = idx
        row = np.ravel_multi_index((n1, n2, n3, n4), [dA] * ARITY)
        col = np.ravel_multi_index((n2, n3, n4, n1), [dA] * ARITY)
        x[row, col] = 1.0
    return x


@lru_cache(maxsize=8)
def _dense_witness(dA: int, dB: int) -> np.ndarray:
    x = x_from_swaps(dA)
    if not np.array_equal(x, x_direct(dA)):
        raise RuntimeError(f"V_12 V_23 V_34 does not reproduce the cyclic shift at dA={dA}")
    dims_b = [dB] * ARITY
    v13v24 = permutation_operator(v_pair(1, 3, 2, 4), dims_b)
    v12v34 = permutation_operator(v_pair(1, 2, 3, 4), dims_b)
    grouped = np.kron(0.5 * (x + x.conj().T), v13v24 - v12v34)
    q = permutation_operator(_grouped_to_interleaved(), [dA] * ARITY + [dB] * ARITY)
    w = q @ grouped @ q.conj().T
    defect = hermiticity_defect(w)
    if defect > OPERATOR_HERMITIAN_TOL:
        raise RuntimeError(f"Dense witness is not Hermitian (defect {defect:.3e})")
    w.setflags(write=False)
    return w


def build_witness_operator(dA: int, dB: int, dense: bool = False,
                           max_dim: int = DENSE_MAX_DIM) -> WitnessOperator:
    if dA < 1 or dB < 1:
        raise ValueError(f"Subsystem dimensions must be positive, got ({dA}, {dB})")
    matrix = None
    if dense:
        check_dense_budget(dA, dB, max_dim)
        logging.debug(f"Building dense {(dA * dB) ** ARITY}-dimensional witness for {dA}x{dB}")
        matrix = _dense_witness(dA, dB)
    return WitnessOperator(dA=dA, dB=dB, terms=witness_terms(), matrix=matrix)


def commutator_terms(state: BipartiteState, basis: LOOBasis | None = None) -> Tuple[np.ndarray, np.ndarray]:
    """Per-pair Tr((rho_mu rho_nu)^2) and Tr(rho_mu^2 rho_nu^2) as (n, n) arrays."""
    basis = default_basis(state.dB) if basis is None else basis
    comps = partial_expansion(state, basis).components
    prod = np.einsum("mij,njk->mnik", comps, comps)
    sq = np.einsum("mij,mjk->mik", comps, comps)
    cross = np.real(np.einsum("mnij,mnji->mn", prod, prod))
    squares = np.real(np.einsum("mij,nji->mn", sq, sq))
    return cross, squares


def eval_commutator(state: BipartiteState, basis: LOOBasis | None = None) -> float:
    """sum_{mu,nu} Tr((rho_mu rho_nu)^2) - Tr(rho_mu^2 rho_nu^2) over the partial expansion.

    Parameters
    ----------
    state : BipartiteState
        State to test.
    basis : LOOBasis, optional
        LOO basis for subsystem B, Gell-Mann by default. The value does not
        depend on this choice.

    Returns
    -------
    value : float
        Tr(W rho^(x)4), nonpositive up to roundoff.
    """
    cross, squares = commutator_terms(state, basis)
    # fixed summation order, independent of thread count
    return float(np.sum(cross - squares))


def eval_commutator_norms(state: BipartiteState, basis: LOOBasis | None = None) -> float:
    """-1/2 sum_{mu,nu} ||[rho_mu, rho_nu]||_F^2, computed from explicit commutators."""
    basis = default_basis(state.dB) if basis is None else basis
    comps = partial_expansion(state, basis).components
    comm = np.einsum("mij,njk->mnik", comps, comps) - np.einsum("nij,mjk->mnik", comps, comps)
    return float(-0.5 * np.sum(np.abs(comm) ** 2))


def eval_permutation(state: BipartiteState, path: str = PATH_AUTO, max_dim: int = DENSE_MAX_DIM) -> float:
    """Tr(W rho^(x)4) from the permutation terms, with no LOO basis involved.

    ``path="dense"`` materializes W and rho^(x)4 (dA*dB <= max_dim only);
    ``path="contraction"`` contracts four copies of rho along each term's index
    wiring; ``"auto"`` picks dense when it fits.
    """
    if path == PATH_AUTO:
        path = PATH_DENSE if state.dim <= max_dim else PATH_CONTRACTION
    if path == PATH_DENSE:
        op = build_witness_operator(state.dA, state.dB, dense=True, max_dim=max_dim)
    elif path == PATH_CONTRACTION:
        op = build_witness_operator(state.dA, state.dB, dense=False)
    else:
        raise ValueError(f"Unknown evaluation path {path!r}")
    return op.expectation(state)


def is_zero_discord(state: BipartiteState, threshold: float = DEFAULT_THRESHOLD,
                    basis: LOOBasis | None = None) -> Tuple[bool, float]:
    value = eval_commutator(state, basis)
    return abs(value) <= threshold, value
