"""Complete sets of local orthogonal observables (LOO) and the partial
expansion rho_AB = sum_mu rho^A_mu (x) G^B_mu of a state over subsystem B.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from discord_witness.preprocessing.states import BipartiteState
from discord_witness.utils.matrix_core import as_matrix, commutator

LOO_TOL = 1e-12
COMPLETENESS_TOL = 1e-10
ORTHOGONAL_TOL = 1e-10
EXPANSION_TOL = 1e-10


def swap_operator(d: int) -> np.ndarray:
    """sum_{n1,n2} |n1 n2><n2 n1| on two copies of a qudit."""
    return np.eye(d * d, dtype=np.complex128).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d)


@dataclass(eq=False)
class LOOBasis:
    """d^2 Hermitian observables with Tr(G_mu G_nu) = delta_mu,nu.

    ``observables`` is stacked as an array of shape (d^2, d, d).
    """
    dim: int
    observables: np.ndarray

    def __post_init__(self):
        self.observables = np.asarray(self.observables, dtype=np.complex128)
        d = self.dim
        if self.observables.shape != (d * d, d, d):
            raise ValueError(f"Expected {d * d} observables of shape ({d}, {d}), got {self.observables.shape}")
        herm = np.max(np.abs(self.observables - self.observables.conj().transpose(0, 2, 1)))
        if herm > LOO_TOL:
            raise ValueError(f"Observables are not Hermitian (defect {herm:.3e})")
        ortho = np.max(np.abs(self.gram() - np.eye(d * d)))
        if ortho > LOO_TOL:
            raise ValueError(f"Observables are not orthonormal (max |Tr(G_mu G_nu) - delta| = {ortho:.3e})")

    def __len__(self):
        return len(self.observables)

    def __iter__(self):
        return iter(self.observables)

    def gram(self) -> np.ndarray:
        """Matrix of Tr(G_mu G_nu)."""
        return np.einsum("mij,nji->mn", self.observables, self.observables)

    def completeness_defect(self) -> float:
        """Max entry of |sum_mu G_mu (x) G_mu - V|, V the two-copy swap."""
        d = self.dim
        total = np.einsum("mij,mkl->ikjl", self.observables, self.observables).reshape(d * d, d * d)
        return float(np.max(np.abs(total - swap_operator(d))))


def gell_mann_basis(d: int) -> LOOBasis:
    """Identity plus the generalized Gell-Mann matrices, all of unit Frobenius norm.

    Ordering: I/sqrt(d), the symmetric pairs (E_jk + E_kj)/sqrt(2) for j < k in
    lexicographic order, the antisymmetric pairs -i(E_jk - E_kj)/sqrt(2) in the
    same order, then the traceless diagonals diag(1, .., 1, -l, 0, ..)/sqrt(l(l+1)).
    For d = 2 this is {I, sigma_x, sigma_y, sigma_z}/sqrt(2).
    """
    if d < 2:
        raise ValueError(f"LOO basis needs d >= 2, got {d}")
    pairs = list(combinations(range(d), 2))
    obs = [np.eye(d, dtype=np.complex128) / np.sqrt(d)]
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = g[k, j] = 1 / np.sqrt(2)
        obs.append(g)
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = -1j / np.sqrt(2)
        g[k, j] = 1j / np.sqrt(2)
        obs.append(g)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        obs.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(np.complex128))
    return LOOBasis(dim=d, observables=np.stack(obs))


def default_basis(d: int) -> LOOBasis:
    """Gell-Mann basis for d >= 2; the single observable [[1]] for a trivial subsystem."""
    if d == 1:
        return LOOBasis(dim=1, observables=np.ones((1, 1, 1), dtype=np.complex128))
    return gell_mann_basis(d)


def rotate_basis(basis: LOOBasis, o) -> LOOBasis:
    """G'_mu = sum_nu o[mu, nu] G_nu for a real orthogonal d^2 x d^2 matrix o."""
    o = np.asarray(o)
    n = len(basis)
    if o.shape != (n, n):
        raise ValueError(f"Rotation must be {n}x{n}, got {o.shape}")
    if np.iscomplexobj(o):
        if np.max(np.abs(o.imag)) > ORTHOGONAL_TOL:
            raise ValueError("Rotation between LOO bases must be real")
        o = o.real
    defect = np.max(np.abs(o.T @ o - np.eye(n)))
    if defect > ORTHOGONAL_TOL:
        raise ValueError(f"Rotation is not orthogonal (max |o^T o - I| = {defect:.3e})")
    return LOOBasis(dim=basis.dim, observables=np.einsum("mn,nij->mij", o, basis.observables))


@dataclass(eq=False)
class PartialExpansion:
    """Components rho^A_mu = Tr_B(rho_AB (I (x) G^B_mu)), stacked as (dB^2, dA, dA)."""
    basis: LOOBasis
    components: np.ndarray

    def __len__(self):
        return len(self.components)

    def reconstruct(self) -> np.ndarray:
        dA, dB = self.components.shape[1], self.basis.dim
        full = np.einsum("mij,mkl->ikjl", self.components, self.basis.observables)
        return full.reshape(dA * dB, dA * dB)

    def commutator_norms(self) -> np.ndarray:
        """Symmetric matrix of ||[rho^A_mu, rho^A_nu]||_F."""
        n = len(self)
        norms = np.zeros((n, n))
        for mu, nu in combinations(range(n), 2):
            norms[mu, nu] = norms[nu, mu] = np.linalg.norm(
                commutator(self.components[mu], self.components[nu]))
        return norms

    def max_commutator_norm(self) -> float:
        return float(self.commutator_norms().max()) if len(self) > 1 else 0.0


def partial_expansion(state: BipartiteState, basis: LOOBasis) -> PartialExpansion:
    if basis.dim != state.dB:
        raise ValueError(f"LOO basis dimension {basis.dim} does not match dB={state.dB}")
    rho = as_matrix(state.rho).reshape(state.dA, state.dB, state.dA, state.dB)
    components = np.einsum("ibjc,mcb->mij", rho, basis.observables)
    expansion = PartialExpansion(basis=basis, components=components)
    residual = np.linalg.norm(expansion.reconstruct() - state.rho)
    if residual > EXPANSION_TOL:
        raise ValueError(f"Partial expansion does not reconstruct the state (residual {residual:.3e})")
    return expansion
