import numpy as np
import pytest
import scipy.constants

from dickenet import (
    AciParams,
    DomainError,
    GravityContext,
    InterferenceTrace,
    aci_interference,
    aci_visibility,
    decoherence_time,
    gaussian_envelope,
    redshift_phase,
)

OMEGA = 2 * np.pi * 0.5e15  # optical clock transition, rad/s


def lab_ctx(**kw):
    return GravityContext(omega_eg=OMEGA, delta_z=1.0, g=9.81, **kw)


class TestRedshiftPhase:
    def test_massless_state(self):
        assert redshift_phase(lab_ctx(), 0, "B", 5.0) == 0.0

    def test_zero_time(self):
        assert redshift_phase(lab_ctx(), 3, "B", 0.0) == 0.0

    def test_one_second_value(self):
        # frozen from a 50-digit mpmath evaluation of omega*g*dz*T/c^2
        # (mpmath.pi * 1e15 * 9.81 / mpmath.mpf(299792458)**2)
        expected = 0.34290788705141472533
        assert redshift_phase(lab_ctx(), 1, "B", 1.0) == pytest.approx(expected, abs=1e-15)

    def test_linear_in_ell_and_time(self):
        ctx = lab_ctx()
        base = redshift_phase(ctx, 1, "B", 1.0)
        assert redshift_phase(ctx, 7, "B", 3.0) == pytest.approx(21 * base, rel=1e-14)

    def test_reference_node_zeroed(self):
        ctx = lab_ctx()
        assert redshift_phase(ctx, 5, "A", 2.0) == 0.0
        ctx_b = lab_ctx(reference_node="B")
        assert redshift_phase(ctx_b, 5, "B", 2.0) == 0.0
        ctx_m = lab_ctx(reference_node="midpoint")
        assert redshift_phase(ctx_m, 1, "A", 1.0) == pytest.approx(
            -redshift_phase(ctx_m, 1, "B", 1.0)
        )

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            redshift_phase(lab_ctx(), 1, "B", -1.0)

    def test_constant_potential_shift_invisible(self):
        a = GravityContext(omega_eg=1.0, c=1.0, g=1.0, phi_a=0.2, phi_b=0.9)
        b = GravityContext(omega_eg=1.0, c=1.0, g=1.0, phi_a=5.2, phi_b=5.9)
        for node in ("A", "B"):
            assert redshift_phase(a, 2, node, 1.5) == pytest.approx(
                redshift_phase(b, 2, node, 1.5), abs=1e-10
            )

    def test_context_validation(self):
        with pytest.raises(DomainError):
            GravityContext(omega_eg=-1.0, delta_z=1.0)
        with pytest.raises(DomainError):
            GravityContext(omega_eg=1.0)  # neither delta_z nor potentials
        with pytest.raises(DomainError):
            GravityContext(omega_eg=1.0, phi_a=0.0)  # phi_b missing

    def test_strong_field_warns(self):
        with pytest.warns(UserWarning):
            GravityContext(omega_eg=1.0, c=1.0, phi_a=0.0, phi_b=0.5)


class TestDecoherenceTime:
    def test_tabletop_value(self):
        # N=100 at maximal energy spread: the paper-scale ~0.5 s window
        delta_e = scipy.constants.hbar * OMEGA * np.sqrt((3 * 100 - 2) / 4)
        tau = decoherence_time(lab_ctx(), delta_e)
        assert abs(tau - 0.5) / 0.5 < 0.05
        assert tau == pytest.approx(0.47781456854983744, rel=1e-12)

    def test_inverse_in_separation(self):
        de = 1e-21
        assert decoherence_time(lab_ctx(), de) == pytest.approx(
            2 * decoherence_time(GravityContext(omega_eg=OMEGA, delta_z=2.0, g=9.81), de)
        )

    def test_inverse_in_energy_spread(self):
        assert decoherence_time(lab_ctx(), 1e-21) == pytest.approx(
            2 * decoherence_time(lab_ctx(), 2e-21)
        )

    def test_nonpositive_energy_rejected(self):
        with pytest.raises(DomainError):
            decoherence_time(lab_ctx(), 0.0)


class TestGaussianEnvelope:
    def test_values(self):
        assert gaussian_envelope(0.0, 2.0) == 1.0
        assert gaussian_envelope(2.0, 2.0) == pytest.approx(np.exp(-1))
        assert gaussian_envelope(4.0, 2.0) == pytest.approx(np.exp(-4))

    def test_bad_tau(self):
        with pytest.raises(DomainError):
            gaussian_envelope(1.0, 0.0)


def toy_ctx():
    # exaggerated-GR regime: unit c so phases accumulate in seconds
    return GravityContext(omega_eg=4.0, c=1.0, g=1.0, delta_z=1.0)


class TestAciInterference:
    def test_starts_at_one(self):
        ctx = toy_ctx()
        params = AciParams.from_excitations(ctx, 1, 3)
        trace = aci_interference(params, ctx, np.array([0.0]))
        assert trace.signal[0] == pytest.approx(1.0)

    def test_cow_limit_is_single_cosine(self):
        ctx = toy_ctx()
        params = AciParams.from_excitations(ctx, 2, 2)
        assert params.omega_eff == 0.0
        t = np.linspace(0, 10, 1001)
        trace = aci_interference(params, ctx, t)
        d_omega = params.m_eff * ctx.delta_phi / scipy.constants.hbar
        assert np.abs(trace.signal - np.cos(d_omega * t)).max() < 1e-12

    def test_beat_first_null(self):
        ctx = toy_ctx()
        params = AciParams.from_excitations(ctx, 1, 3)
        d_small = params.omega_eff * ctx.delta_phi / ctx.c**2
        t_null = np.pi / d_small
        t = np.linspace(0.98 * t_null, 1.02 * t_null, 2001)
        trace = aci_interference(params, ctx, t)
        envelope = np.abs(np.cos(d_small * t / 2))
        assert np.abs(np.abs(trace.signal) - envelope * np.abs(
            np.cos((params.m_eff * ctx.delta_phi / scipy.constants.hbar + d_small / 2) * t)
        )).max() < 1e-9
        assert envelope.min() < 2e-2

    def test_mass_must_be_positive(self):
        with pytest.raises(DomainError):
            AciParams(m_eff=0.0, omega_eff=1.0)
        with pytest.raises(DomainError):
            AciParams.from_excitations(toy_ctx(), 0, 2)


class TestVisibility:
    def test_constant_signal(self):
        t = np.linspace(0, 1, 101)
        vis = aci_visibility(InterferenceTrace(t, np.full(101, 0.25)), window=0.2)
        assert np.all(vis == 0.0)

    def test_pure_cosine(self):
        t = np.linspace(0, 20, 4001)
        vis = aci_visibility(InterferenceTrace(t, np.cos(8.0 * t)), window=2 * 2 * np.pi / 8.0)
        inner = vis[200:-200]
        assert np.abs(inner - 1.0).max() < 1e-3

    def test_beat_visibility_tracks_difference_frequency(self):
        # ell_down >> ell_up - ell_down puts the beat far below the carrier;
        # the min/max window limits resolution near the nulls to about
        # window * |envelope slope|, hence the tolerances
        ctx = toy_ctx()
        params = AciParams.from_excitations(ctx, 100, 101)
        t = np.linspace(0, 3.0, 30001)
        trace = aci_interference(params, ctx, t)
        fast = params.m_eff * ctx.delta_phi / scipy.constants.hbar
        vis = aci_visibility(trace, window=2 * 2 * np.pi / fast)
        d_small = params.omega_eff * ctx.delta_phi / ctx.c**2
        expected = np.abs(np.cos(d_small * t / 2))
        inner = np.s_[400:-400]
        assert np.abs(vis - expected)[inner].max() < 0.05
        assert vis.min() < 0.05 and vis.max() > 0.97

    def test_window_too_small(self):
        t = np.linspace(0, 1, 11)
        with pytest.raises(DomainError):
            aci_visibility(InterferenceTrace(t, np.cos(t)), window=0.01)


class TestInterferenceTrace:
    def test_bound_enforced(self):
        t = np.linspace(0, 1, 5)
        with pytest.raises(DomainError):
            InterferenceTrace(t, 1.5 * np.ones(5))

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            InterferenceTrace(np.zeros(4), np.zeros(5))
