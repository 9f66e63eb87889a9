import numpy as np
import pytest

from discord_witness.postprocessing.discord import (DiscordResult, basis_measurement, classical_correlation,
                                                    condition_on, cq_reconstruct, discord_objective,
                                                    discord_qubit_A, qubit_measurement,
                                                    quantum_mutual_information, von_neumann_entropy)
from discord_witness.preprocessing.states import (CQSpec, assemble_cq, bell_state, haar_unitary, maximally_mixed,
                                                  product_state, random_cq_spec, random_density, random_state,
                                                  werner_family)
from discord_witness.witness.witness import eval_commutator


class TestEntropy:
    def test_pure_state(self, rng):
        assert von_neumann_entropy(random_density(3, rank=1, seed=rng)) == pytest.approx(0.0, abs=1e-10)

    def test_maximally_mixed(self):
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)
        assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)

    def test_diagonal(self):
        assert von_neumann_entropy(np.diag([0.25, 0.75])) == pytest.approx(0.811278, abs=1e-6)

    def test_rejects_invalid(self):
        with pytest.raises(ValueError):
            von_neumann_entropy(np.diag([1.5, -0.5]))


class TestConditioning:
    def test_cq_state_in_its_basis(self, rng):
        spec = CQSpec(probs=[0.3, 0.7], basis=np.eye(2), blocks=[random_density(3, seed=rng) for _ in range(2)])
        outcomes = condition_on(assemble_cq(spec), basis_measurement(np.eye(2)))
        for outcome, p, block in zip(outcomes, spec.probs, spec.blocks):
            assert outcome.p == pytest.approx(p)
            np.testing.assert_allclose(outcome.rho_b, block, atol=1e-12)

    def test_product_state(self, rng):
        rhoB = random_density(2, seed=rng)
        state = product_state(random_density(2, seed=rng), rhoB)
        for outcome in condition_on(state, qubit_measurement(0.7, 1.9)):
            np.testing.assert_allclose(outcome.rho_b, rhoB, atol=1e-12)

    def test_probabilities_sum_to_one(self, rng):
        for _ in range(10):
            state = random_state(2, 3, seed=rng)
            m = qubit_measurement(*rng.uniform(0, np.pi, size=2))
            assert sum(o.p for o in condition_on(state, m)) == pytest.approx(1.0, abs=1e-10)

    def test_empty_outcome_flagged(self):
        state = product_state(np.diag([1.0, 0.0]), np.eye(2) / 2)
        outcomes = condition_on(state, basis_measurement(np.eye(2)))
        assert not outcomes[0].empty
        assert outcomes[1].empty

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError):
            condition_on(random_state(3, 2, seed=rng), qubit_measurement(0.0, 0.0))

    def test_basis_measurement_from_unitary(self, rng):
        m = basis_measurement(haar_unitary(3, seed=rng))
        np.testing.assert_allclose(m.projectors.sum(axis=0), np.eye(3), atol=1e-12)


class TestCorrelations:
    def test_bell_mutual_information(self):
        assert quantum_mutual_information(bell_state()) == pytest.approx(2.0)

    def test_bell_classical_correlation(self):
        assert classical_correlation(bell_state(), qubit_measurement(0.0, 0.0)) == pytest.approx(1.0)

    def test_objective_is_antipodal(self, rng):
        state = random_state(2, 2, seed=rng)
        theta, phi = 0.4, 1.1
        assert discord_objective(state, theta, phi) == pytest.approx(
            discord_objective(state, np.pi - theta, phi + np.pi), abs=1e-12)

    def test_objective_is_mutual_information_gap(self, rng):
        state = random_state(2, 3, seed=rng)
        theta, phi = 1.2, 0.3
        gap = quantum_mutual_information(state) - classical_correlation(state, qubit_measurement(theta, phi))
        assert discord_objective(state, theta, phi) == pytest.approx(gap, abs=1e-10)


class TestDiscordQubit:
    def test_bell(self):
        result = discord_qubit_A(bell_state())
        assert isinstance(result, DiscordResult)
        assert result.value == pytest.approx(1.0, abs=1e-4)
        assert result.mutual_information == pytest.approx(2.0)

    def test_cq_state(self, rng):
        result = discord_qubit_A(assemble_cq(random_cq_spec(2, 3, seed=rng)))
        assert result.value <= 1e-6
        assert result.raw_value >= -1e-9

    def test_product_state(self, rng):
        state = product_state(random_density(2, seed=rng), random_density(2, seed=rng))
        assert discord_qubit_A(state).value == pytest.approx(0.0, abs=1e-9)

    def test_minimum_matches_antipodal_value(self, rng):
        for dB in (2, 3):
            state = random_state(2, dB, seed=rng)
            result = discord_qubit_A(state)
            theta, phi = result.optimal_angles
            at_minimum = discord_objective(state, theta, phi)
            assert at_minimum == pytest.approx(result.raw_value, abs=1e-10)
            assert discord_objective(state, np.pi - theta, phi + np.pi) == pytest.approx(at_minimum, abs=1e-12)

    def test_raw_value_never_below_roundoff(self, rng):
        states = [random_state(2, dB, rank=rank, seed=rng) for dB in (2, 3) for rank in (1, 2, None)]
        states += [assemble_cq(random_cq_spec(2, dB, seed=rng)) for dB in (2, 3)]
        for state in states:
            assert discord_qubit_A(state, grid=16, refine_steps=50).raw_value >= -1e-9

    def test_werner_is_discordant(self):
        assert discord_qubit_A(werner_family(0.5)).value > 1e-3

    def test_deterministic(self, rng):
        state = random_state(2, 2, seed=rng)
        assert discord_qubit_A(state, grid=16) == discord_qubit_A(state, grid=16)

    def test_grid_only(self, rng):
        state = random_state(2, 2, seed=rng)
        coarse = discord_qubit_A(state, grid=16, refine_steps=0)
        refined = discord_qubit_A(state, grid=16)
        assert not coarse.refined
        assert refined.value <= coarse.value + 1e-15

    def test_canonical_angles(self, rng):
        theta, phi = discord_qubit_A(random_state(2, 2, seed=rng), grid=16).optimal_angles
        assert 0.0 <= theta <= np.pi
        assert 0.0 <= phi < 2 * np.pi

    def test_rejects_qutrit(self, rng):
        with pytest.raises(ValueError):
            discord_qubit_A(random_state(3, 2, seed=rng))

    def test_rejects_small_grid(self):
        with pytest.raises(ValueError):
            discord_qubit_A(bell_state(), grid=1)


class TestCQReconstruct:
    def test_round_trip(self, cq_states, rng):
        for state in cq_states:
            spec = cq_reconstruct(state, seed=rng)
            assert spec is not None
            assert np.linalg.norm(assemble_cq(spec).rho - state.rho) <= 1e-7

    def test_bell_is_not_cq(self):
        assert cq_reconstruct(bell_state()) is None

    def test_maximally_mixed(self):
        spec = cq_reconstruct(maximally_mixed(3, 2), seed=0)
        np.testing.assert_allclose(spec.probs, np.full(3, 1 / 3), atol=1e-12)
        for block in spec.blocks:
            np.testing.assert_allclose(block, np.eye(2) / 2, atol=1e-12)

    def test_degenerate_weights(self):
        # one outcome carries no weight at all
        spec = CQSpec(probs=[0.5, 0.5, 0.0], basis=np.eye(3), blocks=[np.eye(2) / 2, np.diag([1.0, 0.0]),
                                                                     np.diag([0.0, 1.0])])
        state = assemble_cq(spec)
        recovered = cq_reconstruct(state, seed=1)
        assert np.linalg.norm(assemble_cq(recovered).rho - state.rho) <= 1e-7

    def test_random_state_is_not_cq(self, rng):
        assert cq_reconstruct(random_state(2, 2, seed=rng)) is None
