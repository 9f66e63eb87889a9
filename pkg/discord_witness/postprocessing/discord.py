"""Ground-truth quantum discord on subsystem A over von Neumann measurements,
and recovery of the classical-quantum form of zero-discord states."""
from dataclasses import dataclass
from typing import List, Tuple
import logging

import numpy as np

from discord_witness.preprocessing.loo import default_basis, partial_expansion
from discord_witness.preprocessing.states import BipartiteState, CQSpec, assemble_cq, diagnose
from discord_witness.utils.matrix_core import as_matrix, eig_hermitian, KEEP_A, KEEP_B

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=np.complex128)

PROJECTOR_TOL = 1e-10
EMPTY_OUTCOME = 1e-12
DEFAULT_GRID = 64
DEFAULT_REFINE_STEPS = 200
MIN_STEP = 1e-12


class ReconstructionError(RuntimeError):
    """Common eigenbasis extraction failed to reproduce a commuting state."""


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits.

    .. math:: S(\\rho) = -\\sum_k \\lambda_k \\log_2 \\lambda_k

    Parameters
    ----------
    rho : (d, d) array_like
        Density matrix.

    Returns
    -------
    entropy : float
        Entropy with 0 log 0 := 0; eigenvalues are clamped to [0, 1] first.

    Examples
    --------
    >>> von_neumann_entropy(np.eye(2) / 2)
    1.0
    """
    rho = as_matrix(rho)
    diag = diagnose(rho)
    if not diag.ok:
        raise ValueError(f"Entropy needs a valid density matrix: {diag}")
    w = np.clip(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)), 0.0, 1.0)
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def _entropies(rhos: np.ndarray) -> np.ndarray:
    """Entropies of a stack of density matrices, without validation."""
    w = np.clip(np.linalg.eigvalsh(rhos), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, -w * np.log2(np.where(w > 0, w, 1.0)), 0.0)
    return terms.sum(axis=-1)


@dataclass(eq=False)
class Measurement:
    """Rank-one projective measurement on A; ``angles`` = (theta, phi) for qubits."""
    projectors: np.ndarray
    angles: Tuple[float, float] | None = None

    def __post_init__(self):
        self.projectors = np.asarray(self.projectors, dtype=np.complex128)
        n, d, _ = self.projectors.shape
        for i, p in enumerate(self.projectors):
            if np.max(np.abs(p @ p - p)) > PROJECTOR_TOL:
                raise ValueError(f"Projector {i} is not idempotent")
            if np.max(np.abs(p - p.conj().T)) > PROJECTOR_TOL:
                raise ValueError(f"Projector {i} is not Hermitian")
        if np.max(np.abs(self.projectors.sum(axis=0) - np.eye(d))) > PROJECTOR_TOL:
            raise ValueError("Projectors do not sum to the identity")
        for i in range(n):
            for j in range(i + 1, n):
                if np.max(np.abs(self.projectors[i] @ self.projectors[j])) > PROJECTOR_TOL:
                    raise ValueError(f"Projectors {i} and {j} are not orthogonal")

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]


def bloch_vector(theta: float, phi: float) -> np.ndarray:
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def qubit_measurement(theta: float, phi: float) -> Measurement:
    """Pi_+- = (I +- n.sigma)/2 along the Bloch direction (theta, phi)."""
    ns = np.einsum("k,kij->ij", bloch_vector(theta, phi), PAULI)
    eye = np.eye(2, dtype=np.complex128)
    return Measurement(projectors=np.stack([(eye + ns) / 2, (eye - ns) / 2]), angles=(theta, phi))


def basis_measurement(basis) -> Measurement:
    """Projectors onto the columns of a unitary."""
    basis = as_matrix(basis)
    return Measurement(projectors=np.einsum("ik,jk->kij", basis, basis.conj()))


@dataclass(frozen=True)
class ConditionalOutcome:
    p: float
    rho_b: np.ndarray | None  # None flags an empty outcome

    @property
    def empty(self) -> bool:
        return self.rho_b is None


def condition_on(state: BipartiteState, m: Measurement) -> List[ConditionalOutcome]:
    """Outcome probabilities p_i = Tr((Pi_i (x) I) rho) and states Tr_A((Pi_i (x) I) rho)/p_i."""
    if m.dim != state.dA:
        raise ValueError(f"Measurement acts on dimension {m.dim}, subsystem A has dA={state.dA}")
    t = state.rho.reshape(state.dA, state.dB, state.dA, state.dB)
    unnormalized = np.einsum("kji,ibjc->kbc", m.projectors, t)
    outcomes = []
    for sub in unnormalized:
        p = float(np.trace(sub).real)
        outcomes.append(ConditionalOutcome(p=p, rho_b=sub / p if p > EMPTY_OUTCOME else None))
    return outcomes


def quantum_mutual_information(state: BipartiteState) -> float:
    """I(A:B) = S(rho_A) + S(rho_B) - S(rho_AB)."""
    return (von_neumann_entropy(state.reduced(KEEP_A)) + von_neumann_entropy(state.reduced(KEEP_B))
            - von_neumann_entropy(state.rho))


def classical_correlation(state: BipartiteState, m: Measurement) -> float:
    """J(B|{Pi_i}) = S(rho_B) - sum_i p_i S(rho_B|i)."""
    conditional = sum(o.p * von_neumann_entropy(o.rho_b) for o in condition_on(state, m) if not o.empty)
    return von_neumann_entropy(state.reduced(KEEP_B)) - conditional


class _QubitObjective:
    """f(theta, phi) = sum_i p_i S(rho_B|i) + S(rho_A) - S(rho_AB), vectorized over angles."""

    def __init__(self, state: BipartiteState):
        if state.dA != 2:
            raise ValueError(f"Discord minimization is implemented for dA = 2, got dA={state.dA}")
        self.t = state.rho.reshape(2, state.dB, 2, state.dB)
        self.offset = von_neumann_entropy(state.reduced(KEEP_A)) - von_neumann_entropy(state.rho)

    def __call__(self, thetas, phis) -> np.ndarray:
        thetas, phis = np.broadcast_arrays(np.atleast_1d(thetas), np.atleast_1d(phis))
        n = np.stack([np.sin(thetas) * np.cos(phis), np.sin(thetas) * np.sin(phis), np.cos(thetas)], axis=-1)
        ns = np.einsum("gk,kij->gij", n.reshape(-1, 3), PAULI)
        eye = np.eye(2, dtype=np.complex128)
        projectors = np.stack([(eye + ns) / 2, (eye - ns) / 2], axis=1)  # (g, 2, 2, 2)
        sub = np.einsum("gkji,ibjc->gkbc", projectors, self.t)
        p = np.real(np.einsum("gkbb->gk", sub))
        safe = np.where(p > EMPTY_OUTCOME, p, 1.0)
        cond = sub / safe[..., None, None]
        cond = 0.5 * (cond + np.conj(np.swapaxes(cond, -1, -2)))
        s = np.where(p > EMPTY_OUTCOME, _entropies(cond), 0.0)
        return (np.sum(p * s, axis=1) + self.offset).reshape(thetas.shape)


def discord_objective(state: BipartiteState, theta: float, phi: float) -> float:
    return float(_QubitObjective(state)(theta, phi)[0])


def _canonical_angles(theta: float, phi: float) -> Tuple[float, float]:
    n = bloch_vector(theta, phi)
    return float(np.arccos(np.clip(n[2], -1.0, 1.0))), float(np.arctan2(n[1], n[0]) % (2 * np.pi))


@dataclass(frozen=True)
class DiscordResult:
    value: float
    optimal_angles: Tuple[float, float]
    grid_resolution: int
    refined: bool
    raw_value: float
    mutual_information: float | None = None


def discord_qubit_A(state: BipartiteState, grid: int = DEFAULT_GRID,
                    refine_steps: int = DEFAULT_REFINE_STEPS) -> DiscordResult:
    """Discord D_A in bits for dA = 2, minimized over projective measurements.

    A grid x grid lattice over theta in [0, pi] (poles included) and phi in
    [0, 2 pi) is searched first; ties go to the lowest linear grid index. The
    best point is then refined by coordinate descent whose step halves whenever
    neither angle improves. Deterministic for fixed arguments.
    """
    if grid < 2:
        raise ValueError(f"grid must be at least 2, got {grid}")
    f = _QubitObjective(state)
    thetas = np.linspace(0.0, np.pi, grid)
    phis = 2 * np.pi * np.arange(grid) / grid
    values = f(thetas[:, None], phis[None, :])
    best = int(np.argmin(values))
    theta, phi = thetas[best // grid], phis[best % grid]
    fbest = float(values.flat[best])

    steps = [np.pi / (grid - 1), 2 * np.pi / grid]
    for _ in range(refine_steps):
        improved = False
        for axis in range(2):
            candidates = [(theta + s, phi) if axis == 0 else (theta, phi + s) for s in (steps[axis], -steps[axis])]
            trial = f(np.array([c[0] for c in candidates]), np.array([c[1] for c in candidates]))
            k = int(np.argmin(trial))
            if trial[k] < fbest:
                (theta, phi), fbest = candidates[k], float(trial[k])
                improved = True
        if not improved:
            steps = [s / 2 for s in steps]
            if max(steps) < MIN_STEP:
                break

    theta, phi = _canonical_angles(theta, phi)
    if fbest < -1e-9:
        logging.warning(f"⚠️ Discord minimum {fbest:.3e} is below the roundoff floor")
    return DiscordResult(value=max(fbest, 0.0), optimal_angles=(theta, phi), grid_resolution=grid,
                         refined=refine_steps > 0, raw_value=fbest,
                         mutual_information=quantum_mutual_information(state))


def _nearest_density(block: np.ndarray) -> np.ndarray:
    w, v = eig_hermitian(0.5 * (block + block.conj().T))
    w = np.clip(w, 0.0, None)
    out = (v * w) @ v.conj().T
    return out / np.trace(out).real


def cq_reconstruct(state: BipartiteState, tol: float = 1e-8, seed=None, max_retries: int = 8) -> CQSpec | None:
    """Recover sum_k p_k |k><k| (x) rho_k^B when the partial-expansion components commute.

    Returns None as soon as some ||[rho^A_mu, rho^A_nu]||_F exceeds ``tol``.
    Otherwise the eigenbasis of a random real combination sum_mu c_mu rho^A_mu
    is taken as the common eigenbasis, and the result must reproduce the state
    within 10 * tol in Frobenius norm; new weights are drawn on failure.
    """
    expansion = partial_expansion(state, default_basis(state.dB))
    worst = expansion.max_commutator_norm()
    if worst > tol:
        logging.debug(f"Expansion components do not commute (max norm {worst:.3e}), not a CQ state")
        return None

    rng = np.random.default_rng(seed)
    t = state.rho.reshape(state.dA, state.dB, state.dA, state.dB)
    residual = np.inf
    for attempt in range(max_retries):
        weights = rng.standard_normal(len(expansion))
        _, basis = eig_hermitian(np.einsum("m,mij->ij", weights, expansion.components))
        blocks = np.einsum("ak,abcd,ck->kbd", basis.conj(), t, basis)
        probs = np.clip(np.real(np.einsum("kbb->k", blocks)), 0.0, None)
        probs = np.where(probs > EMPTY_OUTCOME, probs, 0.0)
        probs = probs / probs.sum()
        rho_b = [_nearest_density(b) if p > EMPTY_OUTCOME else np.eye(state.dB) / state.dB
                 for p, b in zip(probs, blocks)]
        spec = CQSpec(probs=probs, basis=basis, blocks=rho_b)
        residual = np.linalg.norm(assemble_cq(spec).rho - state.rho)
        if residual <= 10 * tol:
            return spec
        logging.info(f"Reconstruction attempt {attempt + 1} left residual {residual:.3e}, retrying")
    raise ReconstructionError(
        f"Common eigenbasis did not reproduce the state after {max_retries} attempts (residual {residual:.3e})")
