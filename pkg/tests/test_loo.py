import numpy as np
import pytest
from scipy.stats import ortho_group

from discord_witness.preprocessing.loo import (LOOBasis, default_basis, gell_mann_basis, partial_expansion,
                                               rotate_basis, swap_operator)
from discord_witness.preprocessing.states import (BipartiteState, assemble_cq, bell_state, product_state,
                                                  random_cq_spec, random_density, random_state)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]])
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


class TestGellMann:
    def test_qubit_basis_is_scaled_paulis(self):
        obs = gell_mann_basis(2).observables
        expected = np.stack([np.eye(2), PAULI_X, PAULI_Y, PAULI_Z]) / np.sqrt(2)
        np.testing.assert_allclose(obs, expected, atol=1e-15)

    def test_qutrit_orthonormal(self):
        basis = gell_mann_basis(3)
        assert len(basis) == 9
        np.testing.assert_allclose(basis.gram(), np.eye(9), atol=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_swap_completeness(self, d):
        assert gell_mann_basis(d).completeness_defect() <= 1e-10

    def test_rejects_scalar_dimension(self):
        with pytest.raises(ValueError):
            gell_mann_basis(1)

    def test_swap_operator_exchanges_factors(self, rng):
        a, b = random_density(3, seed=rng), random_density(3, seed=rng)
        v = swap_operator(3)
        np.testing.assert_allclose(v @ np.kron(a, b) @ v, np.kron(b, a), atol=1e-12)

    def test_rejects_non_orthonormal(self):
        obs = gell_mann_basis(2).observables.copy()
        obs[0] *= 2
        with pytest.raises(ValueError):
            LOOBasis(dim=2, observables=obs)


class TestRotateBasis:
    def test_identity_rotation(self):
        basis = gell_mann_basis(2)
        np.testing.assert_allclose(rotate_basis(basis, np.eye(4)).observables, basis.observables)

    def test_random_rotation_keeps_invariants(self):
        o = ortho_group.rvs(4, random_state=3)
        rotated = rotate_basis(gell_mann_basis(2), o)
        np.testing.assert_allclose(rotated.gram(), np.eye(4), atol=1e-12)
        assert rotated.completeness_defect() <= 1e-10

    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValueError):
            rotate_basis(gell_mann_basis(2), 2 * np.eye(4))

    def test_rejects_complex_rotation(self):
        with pytest.raises(ValueError):
            rotate_basis(gell_mann_basis(2), 1j * np.eye(4))


class TestPartialExpansion:
    def test_product_components_are_proportional(self, rng):
        rhoA, rhoB = random_density(2, seed=rng), random_density(3, seed=rng)
        basis = gell_mann_basis(3)
        expansion = partial_expansion(product_state(rhoA, rhoB), basis)
        for comp, g in zip(expansion.components, basis):
            np.testing.assert_allclose(comp, np.trace(rhoB @ g) * rhoA, atol=1e-12)
        assert expansion.max_commutator_norm() <= 1e-12

    def test_bell_components(self):
        comps = partial_expansion(bell_state(), gell_mann_basis(2)).components
        s = 2 * np.sqrt(2)
        expected = np.stack([np.eye(2), PAULI_X, -PAULI_Y, PAULI_Z]) / s
        np.testing.assert_allclose(comps, expected, atol=1e-15)

    def test_cq_components_commute(self, rng):
        state = assemble_cq(random_cq_spec(3, 2, seed=rng))
        assert partial_expansion(state, gell_mann_basis(2)).max_commutator_norm() <= 1e-10

    def test_reconstruction_and_parseval(self, rng):
        for dA, dB in [(2, 2), (2, 3), (3, 3)]:
            for _ in range(100):
                state = random_state(dA, dB, seed=rng)
                expansion = partial_expansion(state, gell_mann_basis(dB))
                assert np.linalg.norm(expansion.reconstruct() - state.rho) <= 1e-10
                parseval = np.einsum("mij,mij->", expansion.components.conj(), expansion.components).real
                assert parseval == pytest.approx(state.purity(), abs=1e-10)

    def test_trivial_subsystem_basis(self, rng):
        basis = default_basis(1)
        assert len(basis) == 1
        assert basis.completeness_defect() == 0.0
        state = BipartiteState(2, 1, random_density(2, seed=rng))
        expansion = partial_expansion(state, basis)
        np.testing.assert_allclose(expansion.components[0], state.rho)
        assert expansion.max_commutator_norm() == 0.0

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError):
            partial_expansion(random_state(2, 3, seed=rng), gell_mann_basis(2))
