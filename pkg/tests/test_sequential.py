import numpy as np
import pytest

from dickenet import DomainError
from dickenet.sequential import (
    QubitCircuit,
    QubitGate,
    clock_circuit,
    eigenstate_circuit,
    profile_circuit,
    profile_probabilities,
    sequential_basis_index,
    sequential_circuit,
    sequential_populations,
    simulate,
)
from dickenet.serialize import circuit_from_text, circuit_to_text

FIG7C_THETAS = np.pi * np.array([0.79, 0.71, 0.63, 0.54, 0.42])


class TestGateValidation:
    def test_cry_needs_angle(self):
        with pytest.raises(DomainError):
            QubitGate("CRY", 1, 2)

    def test_cnot_takes_no_angle(self):
        with pytest.raises(DomainError):
            QubitGate("CNOT", 1, 2, theta=0.3)

    def test_control_equals_target(self):
        with pytest.raises(DomainError):
            QubitGate("CNOT", 2, 2)

    def test_index_range(self):
        with pytest.raises(DomainError):
            QubitCircuit(4, (QubitGate("CNOT", 1, 5),))


class TestEigenstateCircuit:
    def test_six_excitations_on_ten_qubits(self):
        circ = eigenstate_circuit(10, 6)
        assert len(circ.gates) == 5
        assert all(g.kind == "CNOT" and g.control == 1 for g in circ.gates)
        probs = sequential_populations(simulate(circ), 10)
        assert probs[6] == pytest.approx(1.0, abs=1e-12)

    def test_vacuum_untouched(self):
        circ = eigenstate_circuit(10, 6)
        out = simulate(circ, start_ell=0)
        assert abs(out[0]) == pytest.approx(1.0, abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            eigenstate_circuit(4, 5)


class TestClockCircuit:
    def test_four_eight_structure(self):
        circ = clock_circuit(10, 4, 8)
        kinds = [g.kind for g in circ.gates]
        assert kinds == ["CNOT"] * 3 + ["CH"] + ["CNOT"] * 3
        ch = circ.gates[3]
        assert (ch.control, ch.target) == (1, 5)

    def test_four_eight_distribution(self):
        probs = sequential_populations(simulate(clock_circuit(10, 4, 8)), 10)
        assert probs[4] == pytest.approx(0.5, abs=1e-12)
        assert probs[8] == pytest.approx(0.5, abs=1e-12)

    def test_vacuum_untouched(self):
        out = simulate(clock_circuit(10, 4, 8), start_ell=0)
        assert abs(out[0]) == pytest.approx(1.0, abs=1e-12)

    def test_bad_ordering(self):
        with pytest.raises(DomainError):
            clock_circuit(10, 8, 4)


class TestProfileCircuit:
    def test_reference_angles_match_product_formula(self):
        n = 10
        circ = profile_circuit(n, FIG7C_THETAS)
        sim = sequential_populations(simulate(circ), n)
        formula = profile_probabilities(FIG7C_THETAS, n)
        assert np.abs(sim - formula).max() < 1e-12
        # support is ell = 3..8 for five angles
        assert np.all(sim[:3] == 0.0) and np.all(sim[9:] == 0.0)
        assert sim[3:9].min() > 0.0

    def test_distribution_sums_to_one(self):
        assert profile_probabilities(FIG7C_THETAS, 10).sum() == pytest.approx(1.0, abs=1e-15)

    def test_random_angles_formula_equivalence(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            n = int(rng.integers(6, 13))
            k = int(rng.integers(1, n - 2))
            thetas = rng.uniform(0.05, np.pi - 0.05, size=k)
            sim = sequential_populations(simulate(profile_circuit(n, thetas)), n)
            assert np.abs(sim - profile_probabilities(thetas, n)).max() < 1e-12

    def test_too_many_angles(self):
        with pytest.raises(DomainError):
            profile_circuit(6, np.ones(4))


class TestDispatcherAndSerialization:
    def test_dispatch(self):
        assert sequential_circuit("eigenstate", 8, ell=4) == eigenstate_circuit(8, 4)
        assert sequential_circuit("clock", 8, m1=2, m2=5) == clock_circuit(8, 2, 5)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            sequential_circuit("other", 8)

    def test_text_round_trip(self):
        circ = profile_circuit(9, FIG7C_THETAS[:3])
        text = circuit_to_text(circ)
        assert "CRY" in text and text.startswith("qubits 9")
        assert circuit_from_text(text) == circ


class TestSimulator:
    def test_basis_index_convention(self):
        # qubit 1 is the most significant bit
        assert sequential_basis_index(4, 0) == 0
        assert sequential_basis_index(4, 1) == 0b1000
        assert sequential_basis_index(4, 4) == 0b1111

    def test_rejects_large_registers(self):
        with pytest.raises(DomainError):
            QubitCircuit(21, ())

    def test_non_sequential_population_detected(self):
        # a gate NOT controlled on the previous ladder qubit leaves the ladder
        circ = QubitCircuit(4, (QubitGate("CRY", 1, 3, theta=1.0),))
        state = simulate(circ, start_ell=1)
        with pytest.raises(DomainError):
            sequential_populations(state, 4)
