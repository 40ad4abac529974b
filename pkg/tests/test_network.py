import numpy as np
import pytest

from dickenet import (
    CollectiveAxis,
    DickeState,
    DomainError,
    EnsembleDims,
    GravityContext,
    SeedSpec,
    SymmetricUnitary,
    TwoNodeState,
    apply_local,
    dicke_basis_state,
    evolve_gravity,
    exact_amplifier,
    extract_excitation_profile,
    redshift_phase,
    rotation,
    seed_state,
)
from dickenet.serialize import two_node_state_from_text, two_node_state_to_text


def toy_ctx(**kw):
    return GravityContext(omega_eg=1.7, c=1.0, g=1.0, delta_z=0.9, **kw)


def random_target(dims, rng):
    amps = rng.normal(size=dims.n_atoms) + 1j * rng.normal(size=dims.n_atoms)
    amps /= np.linalg.norm(amps)
    full = np.zeros(dims.dim, dtype=complex)
    full[1:] = amps
    return DickeState(full)


class TestSeedState:
    def test_ideal_seed(self):
        psi = seed_state(EnsembleDims(3))
        amp = psi.amplitudes
        assert amp[0, 1] == pytest.approx(1 / np.sqrt(2))
        assert amp[1, 0] == pytest.approx(1 / np.sqrt(2))
        assert np.count_nonzero(amp) == 2

    def test_phase(self):
        psi = seed_state(EnsembleDims(3), SeedSpec(phi0=np.pi))
        assert psi.amplitudes[1, 0] == pytest.approx(-1 / np.sqrt(2))

    def test_infidelity_population(self):
        psi = seed_state(EnsembleDims(3), SeedSpec(infidelity=0.1))
        assert abs(psi.amplitudes[0, 0]) ** 2 == pytest.approx(0.1)
        assert abs(psi.amplitudes[0, 1]) ** 2 == pytest.approx(0.45)

    def test_bad_infidelity(self):
        with pytest.raises(DomainError):
            SeedSpec(infidelity=1.0)


class TestApplyLocal:
    def test_identity(self):
        dims = EnsembleDims(4)
        psi = seed_state(dims)
        eye = SymmetricUnitary.identity(dims)
        assert np.array_equal(apply_local(eye, eye, psi).amplitudes, psi.amplitudes)

    def test_amplified_seed_has_ideal_form(self):
        # (U (x) U) seed = (|0,psi> + e^{-i phi0} |psi,0>)/sqrt(2) for exact U
        rng = np.random.default_rng(5)
        dims = EnsembleDims(7)
        target = random_target(dims, rng)
        u = exact_amplifier(dims, target)
        phi0 = 0.6
        out = apply_local(u, u, seed_state(dims, SeedSpec(phi0=phi0)))
        expected = np.zeros((8, 8), dtype=complex)
        expected[0, :] += target.amplitudes / np.sqrt(2)
        expected[:, 0] += np.exp(-1j * phi0) * target.amplitudes / np.sqrt(2)
        assert np.abs(out.amplitudes - expected).max() < 1e-12

    def test_norm_preserved_random(self):
        rng = np.random.default_rng(6)
        dims = EnsembleDims(6)
        psi = seed_state(dims, SeedSpec(infidelity=0.2))
        axis = CollectiveAxis.from_angles(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
        u = rotation(dims, axis, 1.3)
        v = rotation(dims, CollectiveAxis.y(), -0.4)
        out = apply_local(u, v, psi)
        assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) < 1e-12

    def test_inverse_round_trip(self):
        dims = EnsembleDims(5)
        u = rotation(dims, CollectiveAxis.x(), 0.7)
        psi = seed_state(dims)
        back = apply_local(u.dagger(), u.dagger(), apply_local(u, u, psi))
        assert np.abs(back.amplitudes - psi.amplitudes).max() < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            apply_local(
                SymmetricUnitary.identity(EnsembleDims(3)),
                SymmetricUnitary.identity(EnsembleDims(3)),
                seed_state(EnsembleDims(4)),
            )


class TestEvolveGravity:
    def test_zero_time_identity(self):
        psi = seed_state(EnsembleDims(4))
        out = evolve_gravity(psi, toy_ctx(), 0.0)
        assert np.array_equal(out.amplitudes, psi.amplitudes)

    def test_relative_phase_structure(self):
        # on (|0,l> + |l,0>)/sqrt(2) the branches differ by phi_{l,B} - phi_{l,A}
        dims = EnsembleDims(6)
        ell, t = 4, 1.7
        amp = np.zeros((7, 7), dtype=complex)
        amp[0, ell] = amp[ell, 0] = 1 / np.sqrt(2)
        ctx = toy_ctx(reference_node="midpoint")
        out = evolve_gravity(TwoNodeState(amp), ctx, t)
        rel = out.amplitudes[0, ell] / out.amplitudes[ell, 0]
        expected = np.exp(-1j * (redshift_phase(ctx, ell, "B", t) - redshift_phase(ctx, ell, "A", t)))
        assert abs(rel - expected) < 1e-12

    def test_semigroup(self):
        psi = seed_state(EnsembleDims(5), SeedSpec(infidelity=0.05))
        ctx = toy_ctx()
        a = evolve_gravity(evolve_gravity(psi, ctx, 1.2), ctx, 0.8)
        b = evolve_gravity(psi, ctx, 2.0)
        assert np.abs(a.amplitudes - b.amplitudes).max() < 1e-12

    def test_node_mass_distributions_preserved(self):
        rng = np.random.default_rng(8)
        dims = EnsembleDims(6)
        u = exact_amplifier(dims, random_target(dims, rng))
        psi = apply_local(u, u, seed_state(dims))
        out = evolve_gravity(psi, toy_ctx(), 3.3)
        for node in ("A", "B"):
            assert np.abs(
                out.node_mass_distribution(node) - psi.node_mass_distribution(node)
            ).max() < 1e-12

    def test_decoded_evolved_state_stays_in_ideal_sector(self):
        # for exact U_p the decoded evolved state stays in the span of the
        # measurement basis states (|0,l> +- |l,0>)/sqrt(2); at T=0 it is
        # exactly the seed again
        rng = np.random.default_rng(9)
        dims = EnsembleDims(8)
        u = exact_amplifier(dims, random_target(dims, rng))
        psi = apply_local(u, u, seed_state(dims, SeedSpec(phi0=1.1)))
        out = evolve_gravity(psi, toy_ctx(), 2.6)
        decoded = apply_local(u.dagger(), u.dagger(), out)
        assert extract_excitation_profile(decoded).leakage == pytest.approx(0.0, abs=1e-12)
        at_zero = apply_local(u.dagger(), u.dagger(), evolve_gravity(psi, toy_ctx(), 0.0))
        amp = at_zero.amplitudes
        assert abs(amp[0, 1]) ** 2 + abs(amp[1, 0]) ** 2 == pytest.approx(1.0, abs=1e-12)


class TestExcitationProfile:
    def test_ideal_clock_profile(self):
        dims = EnsembleDims(10)
        amp = np.zeros((11, 11), dtype=complex)
        amp[0, 4] = amp[0, 8] = 0.5
        amp[4, 0] = amp[8, 0] = 0.5
        prof = extract_excitation_profile(TwoNodeState(amp))
        assert prof.weights[4] == pytest.approx(0.5)
        assert prof.weights[8] == pytest.approx(0.5)
        assert prof.leakage == pytest.approx(0.0, abs=1e-12)

    def test_vacuum_is_pure_leakage(self):
        amp = np.zeros((5, 5), dtype=complex)
        amp[0, 0] = 1.0
        prof = extract_excitation_profile(TwoNodeState(amp))
        assert np.all(prof.weights == 0.0)
        assert prof.leakage == pytest.approx(1.0)

    def test_seed_infidelity_shows_as_leakage(self):
        prof = extract_excitation_profile(seed_state(EnsembleDims(4), SeedSpec(infidelity=0.07)))
        assert prof.leakage == pytest.approx(0.07, abs=1e-12)


class TestExactAmplifier:
    def test_constraint(self):
        rng = np.random.default_rng(10)
        dims = EnsembleDims(9)
        target = random_target(dims, rng)
        u = exact_amplifier(dims, target)
        assert abs(u.matrix[0, 0]) == pytest.approx(1.0, abs=1e-12)
        assert np.abs(u.matrix[:, 1] - target.amplitudes).max() < 1e-12

    def test_rejects_vacuum_component(self):
        dims = EnsembleDims(4)
        with pytest.raises(DomainError):
            exact_amplifier(dims, dicke_basis_state(dims, 0))


class TestSerialization:
    def test_round_trip(self):
        psi = seed_state(EnsembleDims(5), SeedSpec(phi0=0.77, infidelity=0.03))
        again = two_node_state_from_text(two_node_state_to_text(psi))
        assert np.array_equal(again.amplitudes, psi.amplitudes)
