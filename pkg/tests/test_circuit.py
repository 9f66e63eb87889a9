import numpy as np
import pytest

from discord_witness.preprocessing.states import (assemble_cq, bell_state, maximally_mixed, random_cq_spec,
                                                  random_state)
from discord_witness.witness.circuit import (CircuitReadout, ancilla_density, apply_controlled_permutation,
                                             sample_shots, simulate_exact)
from discord_witness.witness.permutations import CopyPermutation, PermutationSpec, permutation_trace
from discord_witness.witness.witness import DenseBudgetError, eval_commutator, eval_permutation, gate_specs

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _random_register(rng, dA, dB):
    n = 4 * (dA * dB) ** 4
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


class TestControlledPermutation:
    def test_control_off_leaves_register(self, rng):
        system = _random_register(rng, 2, 2).reshape(4, -1)[0]
        system = system / np.linalg.norm(system)
        register = np.kron([1, 0, 0, 0], system)  # both ancillas in |0>
        u1, _ = gate_specs()
        np.testing.assert_array_equal(apply_controlled_permutation(register, 1, u1, 2, 2), register)

    def test_control_on_relabels_basis_state(self):
        swap12 = CopyPermutation.transposition(1, 2)
        spec = PermutationSpec(swap12, swap12)
        dims = (2, 2) + (2, 2) * 4
        start = np.zeros(dims)
        # ancilla 1 on, copy 1 = |0,1>, copy 2 = |1,0>, copies 3 and 4 = |0,0>
        start[1, 0, 0, 1, 1, 0, 0, 0, 0, 0] = 1.0
        out = apply_controlled_permutation(start.ravel(), 1, spec, 2, 2).reshape(dims)
        expected = np.zeros(dims)
        expected[1, 0, 1, 0, 0, 1, 0, 0, 0, 0] = 1.0
        np.testing.assert_array_equal(out, expected)

    def test_norm_preserved(self, rng):
        register = _random_register(rng, 2, 2)
        for ancilla, spec in zip((1, 2), gate_specs()):
            out = apply_controlled_permutation(register, ancilla, spec, 2, 2)
            assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)

    def test_batched_matches_single(self, rng):
        batch = np.stack([_random_register(rng, 2, 2) for _ in range(3)])
        u1, _ = gate_specs()
        out = apply_controlled_permutation(batch, 2, u1, 2, 2)
        for row, single in zip(out, batch):
            np.testing.assert_allclose(row, apply_controlled_permutation(single, 2, u1, 2, 2))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_controlled_permutation(np.zeros(10), 1, gate_specs()[0], 2, 2)

    def test_bad_ancilla(self, rng):
        with pytest.raises(ValueError):
            apply_controlled_permutation(_random_register(rng, 2, 2), 3, gate_specs()[0], 2, 2)


class TestSimulateExact:
    def test_bell(self):
        readout = simulate_exact(bell_state())
        assert readout.witness == pytest.approx(-0.375, abs=1e-9)
        assert readout.witness == readout.sx2 - readout.sx1

    def test_maximally_mixed(self):
        readout = simulate_exact(maximally_mixed(2, 3))
        assert readout.sx1 == pytest.approx(readout.sx2, abs=1e-12)
        assert abs(readout.witness) <= 1e-12

    def test_cq_state(self, rng):
        readout = simulate_exact(assemble_cq(random_cq_spec(2, 3, seed=rng)))
        assert abs(readout.witness) <= 1e-9
        assert readout.sx1 == pytest.approx(readout.sx2, abs=1e-9)

    def test_ancilla_expectations_match_traces(self, rng):
        state = random_state(2, 2, seed=rng)
        readout = simulate_exact(state)
        u1, u2 = gate_specs()
        assert readout.sx1 == pytest.approx(permutation_trace(state.rho, 2, 2, u1).real, abs=1e-9)
        assert readout.sx2 == pytest.approx(permutation_trace(state.rho, 2, 2, u2).real, abs=1e-9)

    def test_agrees_with_other_methods(self, random_states):
        for state in random_states:
            witness = simulate_exact(state).witness
            assert abs(witness - eval_permutation(state)) <= 1e-9
            assert abs(witness - eval_commutator(state)) <= 1e-9

    def test_gate_order_invariance(self, rng):
        state = random_state(2, 2, seed=rng)
        forward = simulate_exact(state, gates=(1, 2))
        backward = simulate_exact(state, gates=(2, 1))
        assert forward.sx1 == pytest.approx(backward.sx1, abs=1e-12)
        assert forward.sx2 == pytest.approx(backward.sx2, abs=1e-12)

    def test_dense_cap(self, rng):
        with pytest.raises(DenseBudgetError):
            simulate_exact(random_state(3, 3, seed=rng))

    def test_low_rank_input(self, rng):
        state = random_state(2, 3, rank=2, seed=rng)
        readout = simulate_exact(state)
        assert readout.dropped_mass <= 1e-12
        assert abs(readout.witness - eval_commutator(state)) <= 1e-9


class TestAncillaDensity:
    @pytest.mark.parametrize("ancilla", [1, 2])
    def test_single_gate_marginal(self, rng, ancilla):
        state = random_state(2, 2, seed=rng)
        spec = gate_specs()[ancilla - 1]
        trace = permutation_trace(state.rho, 2, 2, spec).real
        rho = ancilla_density(state, ancilla, gates=(ancilla,))
        np.testing.assert_allclose(rho, (np.eye(2) + trace * PAULI_X) / 2, atol=1e-10)

    def test_untouched_ancilla_stays_plus(self, rng):
        rho = ancilla_density(random_state(2, 2, seed=rng), 2, gates=(1,))
        np.testing.assert_allclose(rho, np.full((2, 2), 0.5), atol=1e-12)


class TestSampleShots:
    def test_reproducible(self):
        state = bell_state()
        assert sample_shots(state, shots=1000, seed=5) == sample_shots(state, shots=1000, seed=5)

    def test_stderr_formula(self, rng):
        readout = sample_shots(random_state(2, 2, seed=rng), shots=5000, seed=1)
        assert isinstance(readout, CircuitReadout)
        assert readout.shots == 5000
        assert readout.stderr1 == pytest.approx(np.sqrt((1 - readout.sx1 ** 2) / 5000))
        assert readout.stderr2 == pytest.approx(np.sqrt((1 - readout.sx2 ** 2) / 5000))
        assert readout.stderr == readout.stderr1 + readout.stderr2

    def test_bell_within_three_sigma(self):
        readout = sample_shots(bell_state(), shots=1_000_000, seed=1)
        assert abs(readout.witness + 0.375) <= 3 * readout.stderr

    def test_cq_within_three_sigma(self, rng):
        readout = sample_shots(assemble_cq(random_cq_spec(2, 2, seed=rng)), shots=1_000_000, seed=2)
        assert abs(readout.witness) <= 3 * readout.stderr

    def test_stderr_scaling(self):
        state = bell_state()
        errors = [sample_shots(state, shots=n, seed=3).stderr for n in (1_000, 10_000, 100_000)]
        for small, large in zip(errors, errors[1:]):
            assert np.sqrt(10) / 1.5 <= small / large <= np.sqrt(10) * 1.5

    def test_rejects_zero_shots(self):
        with pytest.raises(ValueError):
            sample_shots(bell_state(), shots=0)
