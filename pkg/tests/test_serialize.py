import numpy as np
import pytest

from dickenet import CollectiveAxis, DickeState, DomainError, EnsembleDims, InterferenceTrace, rotation
from dickenet.serialize import (
    comparison_to_csv,
    dicke_state_from_text,
    dicke_state_to_text,
    distribution_to_csv,
    trace_to_csv,
    unitary_from_text,
    unitary_to_text,
)


class TestStateText:
    def test_exact_round_trip(self):
        rng = np.random.default_rng(1)
        amps = rng.normal(size=9) + 1j * rng.normal(size=9)
        psi = DickeState(amps / np.linalg.norm(amps))
        again = dicke_state_from_text(dicke_state_to_text(psi))
        assert np.array_equal(again.amplitudes, psi.amplitudes)  # bit-exact via 17 digits

    def test_header(self):
        psi = DickeState(np.array([1.0, 0.0, 0.0], dtype=complex))
        text = dicke_state_to_text(psi)
        assert text.splitlines()[:2] == ["dicke-state", "dim 3"]
        assert text.splitlines()[2] == "(1, 0)"

    def test_malformed_rejected(self):
        with pytest.raises(DomainError):
            dicke_state_from_text("dicke-state\ndim 2\n(1, 0)\n")  # one entry missing
        with pytest.raises(DomainError):
            dicke_state_from_text("something-else\n")


class TestUnitaryText:
    def test_exact_round_trip(self):
        u = rotation(EnsembleDims(6), CollectiveAxis.from_angles(0.7, 2.1), 1.234)
        again = unitary_from_text(unitary_to_text(u))
        assert np.array_equal(again.matrix, u.matrix)

    def test_entry_count_checked(self):
        u = rotation(EnsembleDims(2), CollectiveAxis.z(), 0.5)
        text = unitary_to_text(u)
        truncated = "\n".join(text.splitlines()[:-1])
        with pytest.raises(DomainError):
            unitary_from_text(truncated)


class TestCsv:
    def test_trace_header_and_hash(self):
        trace = InterferenceTrace(np.array([0.0, 1.0]), np.array([1.0, -0.5]))
        text = trace_to_csv(trace, params_hash="abc123")
        lines = text.splitlines()
        assert lines[0].startswith("# dickenet ") and lines[0].endswith("params=abc123")
        assert lines[1] == "T_seconds,I"
        assert lines[3] == "1,-0.5"

    def test_comparison_columns(self):
        text = comparison_to_csv([0.0], [0.5], [0.5000001], params_hash=None)
        row = text.splitlines()[2].split(",")
        assert float(row[3]) == pytest.approx(1e-7)

    def test_distribution_with_target(self):
        text = distribution_to_csv([0.25, 0.75], target=[0.0, 1.0])
        lines = text.splitlines()
        assert lines[1] == "ell,p,p_target"
        assert lines[2] == "0,0.25,0"
