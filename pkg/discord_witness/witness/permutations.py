"""Permutations of state copies and the operators they induce.

Convention: the operator P_sigma moves the tensor factor at position k to
position sigma(k), so that

    Tr(P_sigma (R_1 (x) ... (x) R_n)) = prod_k R_k[x_sigma(k), x_k].

Copy labels are 1-based in the public helpers (V_12, V_13, ...) and 0-based
inside the tuples.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

ARITY = 4


class CopyPermutation:
    """A bijection on copy positions, stored as the tuple (sigma(0), sigma(1), ...)."""

    def __init__(self, mapping: Sequence[int]):
        self._map = tuple(int(i) for i in mapping)
        if sorted(self._map) != list(range(len(self._map))):
            raise ValueError(f"{self._map} is not a permutation of 0..{len(self._map) - 1}")

    @classmethod
    def identity(cls, n: int = ARITY) -> "CopyPermutation":
        return cls(range(n))

    @classmethod
    def transposition(cls, i: int, j: int, n: int = ARITY) -> "CopyPermutation":
        """Swap of copies i and j (1-based labels)."""
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise ValueError(f"Invalid transposition ({i}, {j}) on {n} copies")
        m = list(range(n))
        m[i - 1], m[j - 1] = j - 1, i - 1
        return cls(m)

    @classmethod
    def cyclic_shift(cls, n: int = ARITY) -> "CopyPermutation":
        """Factor k moves to k+1 (mod n); for n = 4 this is X = V_12 V_23 V_34."""
        return cls([(k + 1) % n for k in range(n)])

    def __getitem__(self, k):
        return self._map[k]

    def __len__(self):
        return len(self._map)

    def __iter__(self):
        return iter(self._map)

    def __eq__(self, other):
        return isinstance(other, CopyPermutation) and self._map == other._map

    def __hash__(self):
        return hash(self._map)

    def __repr__(self):
        return f"CopyPermutation({self._map})"

    def __mul__(self, other: "CopyPermutation") -> "CopyPermutation":
        """Composition matching operator products: P_(self*other) = P_self P_other."""
        if len(self) != len(other):
            raise ValueError("Cannot compose permutations of different sizes")
        return CopyPermutation(self._map[other[k]] for k in range(len(self)))

    def inverse(self) -> "CopyPermutation":
        inv = [0] * len(self)
        for k, s in enumerate(self._map):
            inv[s] = k
        return CopyPermutation(inv)

    def cycles(self) -> Tuple[Tuple[int, ...], ...]:
        """Orbits (k, sigma(k), sigma^2(k), ...), fixed points included, each started at its smallest element."""
        visited = [False] * len(self)
        out = []
        for start in range(len(self)):
            if visited[start]:
                continue
            cyc = []
            k = start
            while not visited[k]:
                visited[k] = True
                cyc.append(k)
                k = self._map[k]
            out.append(tuple(cyc))
        return tuple(out)


@dataclass(frozen=True)
class PermutationSpec:
    """Pair of copy permutations acting on the A parts and on the B parts of four copies."""
    a_part: CopyPermutation
    b_part: CopyPermutation

    def __post_init__(self):
        if len(self.a_part) != ARITY or len(self.b_part) != ARITY:
            raise ValueError(f"Permutation specs act on exactly {ARITY} copies")

    @property
    def arity(self) -> int:
        return ARITY

    def dagger(self) -> "PermutationSpec":
        return PermutationSpec(self.a_part.inverse(), self.b_part.inverse())

    def interleaved(self) -> CopyPermutation:
        """The same permutation on the 2*ARITY factors ordered A1, B1, A2, B2, ..."""
        m = [0] * (2 * ARITY)
        for k in range(ARITY):
            m[2 * k] = 2 * self.a_part[k]
            m[2 * k + 1] = 2 * self.b_part[k] + 1
        return CopyPermutation(m)


def permute_factors(tensor: np.ndarray, sigma: CopyPermutation, first_axis: int = 0) -> np.ndarray:
    """Apply P_sigma to the axes ``first_axis .. first_axis + len(sigma) - 1`` of a state tensor."""
    inv = sigma.inverse()
    axes = list(range(tensor.ndim))
    for j in range(len(sigma)):
        axes[first_axis + j] = first_axis + inv[j]
    return np.transpose(tensor, axes)


def permutation_operator(sigma: CopyPermutation, dims: Sequence[int]) -> np.ndarray:
    """Dense matrix of P_sigma on factors with the given dimensions.

    Columns follow ``dims``; rows follow the permuted order, where factor k sits
    at position sigma(k). With unequal dimensions the result is a reordering
    map between two tensor layouts rather than an operator on one space.
    """
    dims = list(dims)
    if len(dims) != len(sigma):
        raise ValueError(f"Need {len(sigma)} factor dimensions, got {len(dims)}")
    total = int(np.prod(dims))
    eye = np.eye(total, dtype=np.complex128).reshape(dims + [total])
    return permute_factors(eye, sigma).reshape(total, total)


def chain_trace(mats: Sequence[np.ndarray], sigma: CopyPermutation) -> complex:
    """Tr(P_sigma (R_1 (x) ... (x) R_n)) as a product of traces along the cycles of sigma.

    A cycle (k, sigma(k), ..., sigma^(L-1)(k)) contributes
    Tr(R_sigma^(L-1)(k) ... R_sigma(k) R_k).
    """
    if len(mats) != len(sigma):
        raise ValueError(f"Need {len(sigma)} operators, got {len(mats)}")
    value = 1.0 + 0j
    for cyc in sigma.cycles():
        prod = mats[cyc[0]]
        for k in cyc[1:]:
            prod = mats[k] @ prod
        value *= np.trace(prod)
    return complex(value)


def _wiring_subscripts(spec: PermutationSpec) -> str:
    a_idx = "abcd"
    b_idx = "efgh"
    operands = [f"{a_idx[spec.a_part[k]]}{b_idx[spec.b_part[k]]}{a_idx[k]}{b_idx[k]}" for k in range(ARITY)]
    return ",".join(operands) + "->"


def permutation_trace(rho: np.ndarray, dA: int, dB: int, spec: PermutationSpec) -> complex:
    """Tr((U^A (x) U^B) rho^(x)4) contracted along the index wiring, never forming rho^(x)4."""
    if spec.a_part == spec.b_part:
        return chain_trace([rho] * ARITY, spec.a_part)
    t = rho.reshape(dA, dB, dA, dB)
    return complex(np.einsum(_wiring_subscripts(spec), t, t, t, t, optimize=True))
