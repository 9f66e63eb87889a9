"""Dense complex-matrix primitives shared by every other module.

Composite indices are row-major and A-major everywhere: the basis state
|a>|b> of a dA x dB system sits at index ``a * dB + b``.
"""

import numpy as np
import scipy.linalg as la

HERMITIAN_TOL = 1e-10

KEEP_A = "A"
KEEP_B = "B"


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"Expected a 2-d matrix, got array with shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Matrix contains NaN or Inf entries")
    return arr


def kron(a, b) -> np.ndarray:
    """Kronecker product; row index of the result is ``i_a * rows(b) + i_b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


def partial_trace(m, dA: int, dB: int, keep: str = KEEP_A) -> np.ndarray:
    """Partial trace of a (dA*dB) x (dA*dB) operator.

    Parameters
    ----------
    m : (dA*dB, dA*dB) array_like
        Operator on the composite system, A-major indexing.
    dA, dB : int
        Subsystem dimensions.
    keep : {"A", "B"}
        Subsystem that survives. ``keep="A"`` traces out B.

    Returns
    -------
    reduced : ndarray
        dA x dA when keeping A, dB x dB when keeping B.
    """
    m = as_matrix(m)
    if m.shape != (dA * dB, dA * dB):
        raise ValueError(f"Operator of shape {m.shape} does not match dims ({dA}, {dB})")
    t = m.reshape(dA, dB, dA, dB)
    if keep == KEEP_A:
        return np.einsum("ibjb->ij", t)
    elif keep == KEEP_B:
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be '{KEEP_A}' or '{KEEP_B}', got {keep!r}")


def hermiticity_defect(m) -> float:
    """Largest entry of |m - m^dagger|."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"Matrix of shape {m.shape} is not square")
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_defect(m) <= tol


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in descending order and the eigenvectors as columns,
    so that ``m = V @ diag(w) @ V^dagger``.
    """
    m = as_matrix(m)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"Matrix is not Hermitian: max |m - m^dagger| = {defect:.3e} > {tol:.1e}")
    # symmetrize away the sub-tolerance skew part before handing to LAPACK
    w, v = la.eigh(0.5 * (m + m.conj().T))
    return w[::-1].copy(), v[:, ::-1].copy()


def frobenius_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dagger b)."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"Shape mismatch in inner product: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(as_matrix(a)))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def unitarity_defect(u) -> float:
    """Frobenius norm of u^dagger u - I."""
    u = as_matrix(u)
    return frobenius_norm(u.conj().T @ u - np.eye(u.shape[1]))

