import numpy as np
import pytest

from dickenet import (
    CollectiveAxis,
    DickeState,
    DomainError,
    EnsembleDims,
    apply_local,
    extract_excitation_profile,
    rotation,
    seed_state,
    u_dt,
)
from dickenet.varprep import (
    CostSpec,
    OptimizerConfig,
    VariationalAnsatz,
    _circuit_columns,
    _initial_point,
    build_circuit,
    clock,
    coherent,
    cost_energy,
    cost_target,
    mass_eigenstate,
    n_reduced_params,
    optimize,
    params_to_ansatz,
)
from dickenet.serialize import ansatz_from_text, ansatz_to_text

Y, Z = CollectiveAxis.y(), CollectiveAxis.z()


class TestBuildCircuit:
    def test_zero_angles_give_identity(self):
        dims = EnsembleDims(6)
        ansatz = VariationalAnsatz(((Z, 0.0),), Z, 0.0)
        assert np.abs(build_circuit(dims, ansatz).matrix - np.eye(7)).max() < 1e-12

    def test_single_z_twist_is_diagonal_phases(self):
        dims = EnsembleDims(5)
        chi = 0.61
        ansatz = VariationalAnsatz(((Z, chi),), Z, 0.0)
        expected = np.diag(np.exp(-1j * chi * (np.arange(6) - 2.5) ** 2))
        assert np.abs(build_circuit(dims, ansatz).matrix - expected).max() < 1e-12

    def test_double_twist_parameters_reproduce_closed_form(self):
        # the scalable two-layer circuit is a special case of the ansatz
        n = 8
        dims = EnsembleDims(n)
        sign = 1.0 if (n // 2) % 2 == 1 else -1.0
        ansatz = VariationalAnsatz(
            ((CollectiveAxis.x(), np.pi / 2), (Y, sign * np.pi / 2)), Z, 0.0
        )
        assert np.abs(build_circuit(dims, ansatz).matrix - u_dt(dims).matrix).max() < 1e-10

    def test_needs_a_layer(self):
        with pytest.raises(DomainError):
            VariationalAnsatz((), Z, 0.0)

    def test_fast_columns_match_public_gates(self):
        rng = np.random.default_rng(2)
        dims = EnsembleDims(14)
        for p in (1, 3):
            params = _initial_point(rng, p)
            ansatz = params_to_ansatz(params, p)
            cols = _circuit_columns(dims, ansatz)
            full = build_circuit(dims, ansatz).matrix
            assert np.abs(cols - full[:, :2]).max() < 1e-12


class TestCostTarget:
    def test_identity_on_single_excitation_target(self):
        dims = EnsembleDims(8)
        eye = build_circuit(dims, VariationalAnsatz(((Z, 0.0),), Z, 0.0))
        assert cost_target(eye, mass_eigenstate(dims, 1), 1.0) == pytest.approx(-2.0)

    def test_identity_on_higher_target_scores_vacuum_only(self):
        dims = EnsembleDims(8)
        eye = build_circuit(dims, VariationalAnsatz(((Z, 0.0),), Z, 0.0))
        assert cost_target(eye, mass_eigenstate(dims, 2), 1.0) == pytest.approx(-1.0)

    def test_lower_bound(self):
        rng = np.random.default_rng(3)
        dims = EnsembleDims(9)
        target = clock(dims, 2, 7)
        for _ in range(10):
            ansatz = params_to_ansatz(_initial_point(rng, 2), 2)
            value = cost_target(build_circuit(dims, ansatz), target, 1.4)
            assert value >= -(1 + 1.4) - 1e-12

    def test_z_rotation_gauge_invariance(self):
        rng = np.random.default_rng(4)
        dims = EnsembleDims(10)
        target = clock(dims, 3, 8)
        ansatz = params_to_ansatz(_initial_point(rng, 2), 2)
        u = build_circuit(dims, ansatz)
        base = cost_target(u, target, 1.0)
        for phase in (0.3, 1.7, 4.4):
            rz = rotation(dims, Z, phase)
            assert cost_target(rz @ u, target, 1.0) == pytest.approx(base, abs=1e-10)
            assert cost_target(u @ rz, target, 1.0) == pytest.approx(base, abs=1e-10)

    def test_only_target_moduli_matter(self):
        rng = np.random.default_rng(5)
        dims = EnsembleDims(10)
        target = clock(dims, 3, 8)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=11))
        rephased = DickeState(target.amplitudes * phases)
        ansatz = params_to_ansatz(_initial_point(rng, 2), 2)
        u = build_circuit(dims, ansatz)
        assert cost_target(u, rephased, 1.0) == pytest.approx(cost_target(u, target, 1.0), abs=1e-12)


class TestCostEnergy:
    def test_max_excitation_map(self):
        # U: |1> -> |N-1>, |0> -> |0> gives -1 - (N-2)/(2N) at lam1=1
        n = 8
        dims = EnsembleDims(n)
        u = u_dt(dims)
        assert cost_energy(u, 1.0, 0.0) == pytest.approx(-1.0 - (n - 2) / (2 * n), abs=1e-12)

    def test_zero_weights_reduce_to_vacuum_fidelity(self):
        dims = EnsembleDims(6)
        u = u_dt(dims)
        assert cost_energy(u, 0.0, 0.0) == pytest.approx(-abs(u.matrix[0, 0]) ** 2)

    def test_double_twist_maximizes_mean_excitation_objective(self):
        # lam2 = 0: no unitary satisfying the vacuum constraint beats |1> -> |N-1>
        rng = np.random.default_rng(6)
        dims = EnsembleDims(6)
        best = cost_energy(u_dt(dims), 1.0, 0.0)
        for _ in range(20):
            ansatz = params_to_ansatz(_initial_point(rng, 2), 2)
            assert cost_energy(build_circuit(dims, ansatz), 1.0, 0.0) >= best - 1e-9

    def test_negative_weights_rejected(self):
        with pytest.raises(DomainError):
            cost_energy(u_dt(EnsembleDims(4)), -0.1, 0.0)


class TestCostSpec:
    def test_target_kind_needs_target(self):
        with pytest.raises(DomainError):
            CostSpec("target_distribution")

    def test_energy_kind_rejects_target(self):
        with pytest.raises(DomainError):
            CostSpec("energy_moments", target=mass_eigenstate(EnsembleDims(4), 1))

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            CostSpec("other")


class TestTargets:
    def test_mass_eigenstate(self):
        assert mass_eigenstate(EnsembleDims(8), 6).amplitudes[6] == 1.0

    def test_clock_examples(self):
        psi = clock(EnsembleDims(20), 4, 8)
        assert psi.amplitudes[4] == pytest.approx(1 / np.sqrt(2))
        assert psi.amplitudes[8] == pytest.approx(1 / np.sqrt(2))

    def test_coherent_binomial(self):
        from math import comb

        n = 20
        p = np.abs(coherent(EnsembleDims(n)).amplitudes) ** 2
        ref = np.array([comb(n, k) for k in range(n + 1)]) / 2.0**n
        assert np.abs(p - ref).max() < 1e-12

    def test_range_checks(self):
        dims = EnsembleDims(10)
        with pytest.raises(DomainError):
            mass_eigenstate(dims, 0)
        with pytest.raises(DomainError):
            clock(dims, 5, 5)
        with pytest.raises(DomainError):
            clock(dims, 0, 4)


class TestOptimize:
    def test_single_excitation_target_reaches_known_optimum(self):
        dims = EnsembleDims(5)
        spec = CostSpec("target_distribution", target=mass_eigenstate(dims, 1), lam=1.0)
        cfg = OptimizerConfig(restarts=6, max_evals=6000, simplex_tol=1e-12, seed=3, hops=1)
        result = optimize(dims, spec, 1, cfg)
        assert result.cost == pytest.approx(-2.0, abs=1e-6)

    def test_deterministic_for_fixed_seed(self):
        dims = EnsembleDims(6)
        spec = CostSpec("target_distribution", target=mass_eigenstate(dims, 3), lam=1.0)
        cfg = OptimizerConfig(restarts=4, max_evals=2000, simplex_tol=1e-9, seed=21, hops=1)
        a = optimize(dims, spec, 2, cfg)
        b = optimize(dims, spec, 2, cfg)
        assert a.cost == b.cost
        assert np.array_equal(a.params, b.params)
        assert a.restart == b.restart

    def test_small_eigenstate_pipeline_quality(self):
        # miniature version of the production preparation run
        dims = EnsembleDims(8)
        spec = CostSpec("target_distribution", target=mass_eigenstate(dims, 3), lam=1.0)
        cfg = OptimizerConfig(restarts=12, max_evals=20000, simplex_tol=1e-10, seed=5, hops=3)
        result = optimize(dims, spec, 2, cfg)
        u = build_circuit(dims, result.ansatz)
        assert abs(u.matrix[0, 0]) ** 2 > 0.9
        state = apply_local(u, u, seed_state(dims))
        assert extract_excitation_profile(state).leakage < 0.1

    def test_parameter_count(self):
        assert n_reduced_params(3) == 10
        with pytest.raises(DomainError):
            params_to_ansatz(np.zeros(9), 3)

    def test_bad_config(self):
        with pytest.raises(DomainError):
            OptimizerConfig(restarts=0)


class TestAnsatzSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(12)
        ansatz = params_to_ansatz(_initial_point(rng, 3), 3)
        text = ansatz_to_text(12, ansatz, cost=-1.5, seed=9, cost_spec="target_distribution lambda=1")
        n_atoms, again, meta = ansatz_from_text(text)
        assert n_atoms == 12
        assert meta["cost"] == "-1.5"
        dims = EnsembleDims(12)
        assert np.abs(build_circuit(dims, again).matrix - build_circuit(dims, ansatz).matrix).max() < 1e-12
