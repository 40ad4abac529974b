"""Self-verification registry: every module invariant as a deterministic check.

``run_checks("fast")`` keeps every oracle at small N for a quick signal;
``run_checks("full")`` widens to the documented ranges (oracle equivalences at
N <= 12, closed forms to N = 40, QFI to N = 100).  All randomness is drawn
from fixed seeds and every detail string is formatted deterministically, so
two runs of the same level produce byte-identical reports.

Formula-vs-oracle checks call the analytic formulas through the module
namespace, so an injected mutation (monkeypatched or edited) is caught by the
corresponding check rather than silently absorbed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import dicke, exact_circuits, gravity, measurement, network, sequential, serialize, varprep
from .dicke import CollectiveAxis, DickeState, EnsembleDims
from .gravity import GravityContext, InterferenceTrace
from .network import SeedSpec


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _axis(rng) -> CollectiveAxis:
    return CollectiveAxis.from_angles(np.arccos(rng.uniform(-1, 1)), rng.uniform(0, 2 * np.pi))


def _random_ideal_scenario(rng, n_max: int):
    """A randomized end-to-end ideal state: seed -> exact amplifier -> evolution."""
    n = int(rng.integers(2, n_max + 1))
    dims = EnsembleDims(n)
    amps = rng.normal(size=n) + 1j * rng.normal(size=n)
    amps /= np.linalg.norm(amps)
    target = np.zeros(n + 1, dtype=complex)
    target[1:] = amps
    psi = DickeState(target)
    phi0 = float(rng.uniform(0, 2 * np.pi))
    u_p = network.exact_amplifier(dims, psi)
    state = network.apply_local(u_p, u_p, network.seed_state(dims, SeedSpec(phi0=phi0)))
    # omega * phi / c^2 stays O(1) while |phi|/c^2 stays weak-field
    ctx = GravityContext(
        omega_eg=float(rng.uniform(0.5, 2.0)) * 1e4,
        c=1.0,
        g=1e-4,
        delta_z=float(rng.uniform(0.2, 2.0)),
        reference_node=("A", "B", "midpoint")[int(rng.integers(3))],
    )
    t = float(rng.uniform(0.0, 8.0))
    evolved = network.evolve_gravity(state, ctx, t)
    return dims, evolved, u_p, ctx, phi0, t


# ---------------------------------------------------------------------------
# dicke-core
# ---------------------------------------------------------------------------

def check_spin_algebra(level):
    ns = range(1, 9) if level == "fast" else range(1, 41)
    worst = 0.0
    for n in ns:
        dims = EnsembleDims(n)
        sx = dicke.collective_spin(dims, CollectiveAxis.x())
        sy = dicke.collective_spin(dims, CollectiveAxis.y())
        sz = dicke.collective_spin(dims, CollectiveAxis.z())
        s = n / 2
        comm = np.abs(sx @ sy - sy @ sx - 1j * sz).max()
        casimir = np.abs(sx @ sx + sy @ sy + sz @ sz - s * (s + 1) * np.eye(n + 1)).max()
        worst = max(worst, comm, casimir)
    return worst < 1e-10, f"max algebra defect {worst:.3e}"


def check_gate_unitarity(level):
    rng = np.random.default_rng(101)
    worst = 0.0
    for n in (1, 2, 5, 12, 25):
        dims = EnsembleDims(n)
        for _ in range(4):
            axis, angle = _axis(rng), float(rng.uniform(-6, 6))
            for gate in (dicke.rotation(dims, axis, angle), dicke.oat(dims, axis, angle)):
                worst = max(worst, np.abs(gate.matrix.conj().T @ gate.matrix - np.eye(n + 1)).max())
    return worst < 1e-10, f"max unitarity defect {worst:.3e}"


def _rodrigues(axis: np.ndarray, theta: float) -> np.ndarray:
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(theta) * k + (1 - np.cos(theta)) * (k @ k)


def check_rotation_covariance(level):
    rng = np.random.default_rng(102)
    worst = 0.0
    for n in (2, 7, 16):
        dims = EnsembleDims(n)
        for _ in range(4):
            rot_axis, theta = _axis(rng), float(rng.uniform(-4, 4))
            meas_axis = _axis(rng)
            r = dicke.rotation(dims, rot_axis, theta).matrix
            lhs = r @ dicke.collective_spin(dims, meas_axis) @ r.conj().T
            rotated = _rodrigues(rot_axis.direction, theta) @ meas_axis.direction
            rhs = dicke.collective_spin(dims, CollectiveAxis(rotated / np.linalg.norm(rotated)))
            worst = max(worst, np.abs(lhs - rhs).max())
    return worst < 1e-9, f"max covariance defect {worst:.3e}"


def check_expm_cross(level):
    rng = np.random.default_rng(103)
    worst = 0.0
    for n in (4, 9):
        dims = EnsembleDims(n)
        for _ in range(3):
            axis, chi = _axis(rng), float(rng.uniform(-2, 2))
            ours = dicke.oat(dims, axis, chi).matrix
            sn = dicke.collective_spin(dims, axis)
            pade = scipy.linalg.expm(-1j * chi * (sn @ sn))
            worst = max(worst, np.abs(ours - pade).max())
    return worst < 1e-10, f"max eigen-vs-Pade defect {worst:.3e}"


def check_rotated_variance_identity(level):
    ns = (4, 20) if level == "fast" else (4, 20, 100)
    worst = 0.0
    for n in ns:
        dims = EnsembleDims(n)
        for beta in np.linspace(0.0, 2 * np.pi, 21):
            psi = dicke.apply(dicke.rotation(dims, CollectiveAxis.y(), beta),
                              dicke.dicke_basis_state(dims, n - 1))
            var = dicke.energy_moments(psi).variance
            worst = max(worst, abs(var - (3 * n - 2) / 4 * np.sin(beta) ** 2))
    return worst < 1e-10, f"max variance-identity defect {worst:.3e}"


def check_coherent_binomial(level):
    from math import comb

    n = 20
    dims = EnsembleDims(n)
    p = dicke.mass_distribution(varprep.coherent(dims))
    ref = np.array([comb(n, ell) for ell in range(n + 1)]) / 2.0**n
    worst = np.abs(p - ref).max()
    return worst < 1e-12, f"max binomial defect {worst:.3e}"


def check_fidelity_overlap(level):
    rng = np.random.default_rng(104)
    worst = 0.0
    for n in (3, 11):
        dims = EnsembleDims(n)
        vac = dicke.dicke_basis_state(dims, 0)
        for _ in range(5):
            theta = float(rng.uniform(0, np.pi))
            f = dicke.fidelity(vac, dicke.apply(dicke.rotation(dims, CollectiveAxis.y(), theta), vac))
            worst = max(worst, abs(f - np.cos(theta / 2) ** (2 * n)))
    return worst < 1e-12, f"max overlap-formula defect {worst:.3e}"


def check_husimi_poles(level):
    dims = EnsembleDims(8)
    vac = dicke.dicke_basis_state(dims, 0)
    q = dicke.husimi_q(vac, [(0.0, 0.0), (np.pi, 0.0)])
    ok = abs(q[0] - 1.0) < 1e-12 and q[1] < 1e-12
    return ok, f"Q(south)={q[0]:.6f} Q(north)={q[1]:.3e}"


# ---------------------------------------------------------------------------
# gravity
# ---------------------------------------------------------------------------

def check_reference_shift(level):
    base = GravityContext(omega_eg=1e4, c=1.0, g=1e-4, phi_a=0.3e-4, phi_b=1.1e-4,
                          reference_node="midpoint")
    shifted = GravityContext(omega_eg=1e4, c=1.0, g=1e-4, phi_a=0.3e-4 + 7e-4, phi_b=1.1e-4 + 7e-4,
                             reference_node="midpoint")
    t = np.linspace(0, 10, 200)
    w = np.zeros(6)
    w[2], w[5] = 0.4, 0.6
    worst = 0.0
    for phi0 in (0.0, 1.3):
        for fn in (measurement.signal_nonlocal_analytic, measurement.signal_local_analytic):
            worst = max(worst, np.abs(fn(w, base, phi0, t) - fn(w, shifted, phi0, t)).max())
    lin = abs(gravity.redshift_phase(base, 6, "B", 2.0) - 12 * gravity.redshift_phase(base, 1, "B", 1.0))
    worst = max(worst, lin)
    return worst < 1e-10, f"max shift/linearity defect {worst:.3e}"


def check_decoherence_scaling(level):
    ctx = GravityContext(omega_eg=2 * np.pi * 0.5e15, delta_z=1.0, g=9.81)
    ctx2 = GravityContext(omega_eg=2 * np.pi * 0.5e15, delta_z=2.0, g=9.81)
    de = 1e-20
    r1 = gravity.decoherence_time(ctx, de) / gravity.decoherence_time(ctx2, de)
    r2 = gravity.decoherence_time(ctx, de) / gravity.decoherence_time(ctx, 2 * de)
    worst = max(abs(r1 - 2.0), abs(r2 - 2.0))
    return worst < 1e-12, f"max scaling defect {worst:.3e}"


def check_aci_beat(level):
    ctx = GravityContext(omega_eg=4e4, c=1.0, g=1e-4, delta_z=1.0)
    times = np.linspace(0, 3.0, 30001)
    cow = gravity.aci_interference(gravity.AciParams.from_excitations(ctx, 2, 2), ctx, times)
    d_omega = 2 * gravity.redshift_phase(ctx, 1, "B", 1.0)
    worst = np.abs(cow.signal - np.cos(d_omega * times)).max()
    # carrier from 100 excitations, beat from one: a clean visibility hierarchy
    aci = gravity.AciParams.from_excitations(ctx, 100, 101)
    beat = gravity.aci_interference(aci, ctx, times)
    fast = 100 * gravity.redshift_phase(ctx, 1, "B", 1.0)
    vis = gravity.aci_visibility(beat, window=2 * 2 * np.pi / fast)
    dw = aci.omega_eff * ctx.delta_phi / ctx.c**2
    inner = np.s_[400:-400]
    worst = max(worst, np.abs(vis - np.abs(np.cos(dw * times / 2)))[inner].max())
    return worst < 0.05, f"max COW/visibility defect {worst:.3e}"


# ---------------------------------------------------------------------------
# network
# ---------------------------------------------------------------------------

def check_network_invariants(level):
    rng = np.random.default_rng(105)
    dims = EnsembleDims(8)
    ctx = GravityContext(omega_eg=1.3e4, c=1.0, g=1e-4, delta_z=0.7, reference_node="B")
    amps = rng.normal(size=8) + 1j * rng.normal(size=8)
    amps /= np.linalg.norm(amps)
    target = np.zeros(9, dtype=complex)
    target[1:] = amps
    u_p = network.exact_amplifier(dims, DickeState(target))
    state = network.apply_local(u_p, u_p, network.seed_state(dims, SeedSpec(phi0=0.4)))
    worst = abs(np.sum(np.abs(state.amplitudes) ** 2) - 1.0)
    # semigroup
    one = network.evolve_gravity(network.evolve_gravity(state, ctx, 1.1), ctx, 2.2)
    two = network.evolve_gravity(state, ctx, 3.3)
    worst = max(worst, np.abs(one.amplitudes - two.amplitudes).max())
    # local mass distributions preserved
    for node in ("A", "B"):
        worst = max(worst, np.abs(one.node_mass_distribution(node) - state.node_mass_distribution(node)).max())
    # decoding keeps the evolved state inside the ideal sector; at T=0 it
    # returns it to the two-dimensional seed pair exactly
    decoded = network.apply_local(u_p.dagger(), u_p.dagger(), one)
    worst = max(worst, abs(network.extract_excitation_profile(decoded).leakage))
    at_zero = network.apply_local(u_p.dagger(), u_p.dagger(), state)
    pair = abs(at_zero.amplitudes[0, 1]) ** 2 + abs(at_zero.amplitudes[1, 0]) ** 2
    worst = max(worst, 1.0 - pair)
    # apply then unapply
    back = network.apply_local(u_p.dagger(), u_p.dagger(), network.apply_local(u_p, u_p, state))
    worst = max(worst, np.abs(back.amplitudes - state.amplitudes).max())
    return worst < 1e-10, f"max network defect {worst:.3e}"


# ---------------------------------------------------------------------------
# varprep
# ---------------------------------------------------------------------------

def check_cost_invariances(level):
    rng = np.random.default_rng(106)
    dims = EnsembleDims(10)
    target = varprep.clock(dims, 2, 6)
    worst = 0.0
    for _ in range(4):
        params = varprep._initial_point(rng, 2)
        ansatz = varprep.params_to_ansatz(params, 2)
        u = varprep.build_circuit(dims, ansatz)
        base = varprep.cost_target(u, target, 1.3)
        for phase in (0.7, 2.9):
            rz = dicke.rotation(dims, CollectiveAxis.z(), phase)
            worst = max(worst, abs(varprep.cost_target(rz @ u, target, 1.3) - base))
            worst = max(worst, abs(varprep.cost_target(u @ rz, target, 1.3) - base))
            worst = max(worst, abs(varprep.cost_energy(rz @ u, 0.8, 0.6) - varprep.cost_energy(u, 0.8, 0.6)))
        # only moduli of the target enter
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=11))
        twisted = DickeState(target.amplitudes * phases)
        worst = max(worst, abs(varprep.cost_target(u, twisted, 1.3) - base))
    return worst < 1e-10, f"max cost-invariance defect {worst:.3e}"


def check_kernel_agreement(level):
    from . import _kernels

    if not _kernels.HAVE_NUMBA:
        return True, "numba unavailable, numpy path only"
    rng = np.random.default_rng(107)
    dims = EnsembleDims(12)
    worst = 0.0
    for kind in ("target_distribution", "energy_moments"):
        if kind == "target_distribution":
            spec = varprep.CostSpec(kind, target=varprep.clock(dims, 3, 7), lam=1.2)
        else:
            spec = varprep.CostSpec(kind, lam1=0.9, lam2=0.4)
        fast = _kernels.make_objective(12, 3, spec)
        for _ in range(5):
            x = varprep._initial_point(rng, 3)
            ref = varprep._cost_of_columns(
                varprep._circuit_columns(dims, varprep.params_to_ansatz(x, 3)), spec
            )
            worst = max(worst, abs(fast(x) - ref))
    return worst < 1e-12, f"max kernel-vs-numpy defect {worst:.3e}"


def check_optimize_reproducibility(level):
    dims = EnsembleDims(6)
    spec = varprep.CostSpec("target_distribution", target=varprep.mass_eigenstate(dims, 2), lam=1.0)
    cfg = varprep.OptimizerConfig(restarts=3, max_evals=1500, simplex_tol=1e-9, seed=42, hops=1)
    a = varprep.optimize(dims, spec, 1, cfg)
    b = varprep.optimize(dims, spec, 1, cfg)
    identical = a.cost == b.cost and np.array_equal(a.params, b.params)
    return identical, f"best cost {a.cost:.9f}, identical={identical}"


# ---------------------------------------------------------------------------
# exact circuits
# ---------------------------------------------------------------------------

def check_udt_closed_form(level):
    ns = range(2, 17, 2) if level == "fast" else range(2, 41, 2)
    worst = 0.0
    for n in ns:
        dims = EnsembleDims(n)
        worst = max(worst, np.abs(exact_circuits.u_dt(dims).matrix
                                  - exact_circuits.u_dt_closed_form(dims).matrix).max())
        pos = exact_circuits.u_dt_positive_angle(dims).matrix
        ref = exact_circuits.u_dt(dims).matrix
        inner = np.trace(ref.conj().T @ pos) / (n + 1)
        worst = max(worst, np.abs(pos - inner / abs(inner) * ref).max())
    return worst < 1e-10, f"max closed-form defect {worst:.3e}"


def check_qfi(level):
    ns = (4, 12, 20) if level == "fast" else tuple(range(2, 101, 2))
    worst = 0.0
    for n in ns:
        dims = EnsembleDims(n)
        f = exact_circuits.qfi_differential_phase(exact_circuits.noon_minus_one(dims))
        worst = max(worst, abs(f - (n - 1) ** 2))
        full = np.zeros((n + 1, n + 1), dtype=complex)
        full[0, n] = full[n, 0] = 1 / np.sqrt(2)
        worst = max(worst, abs(exact_circuits.qfi_differential_phase(network.TwoNodeState(full)) - n**2))
    return worst < 1e-8, f"max QFI defect {worst:.3e}"


def check_v_alpha(level):
    n = 40 if level == "fast" else 100
    dims = EnsembleDims(n)
    details = []
    ok = True
    for alpha in (np.pi / 50, np.pi / 12):
        spec = exact_circuits.AlphaSpec(alpha)
        v = exact_circuits.v_alpha(dims, spec)
        vac = abs(v.matrix[0, 0]) ** 2
        branch = exact_circuits.excited_branch(dims, spec)
        ref = dicke.apply(dicke.rotation(dims, CollectiveAxis.y(), -2 * alpha),
                          dicke.dicke_basis_state(dims, n - 1))
        fid = dicke.fidelity(branch, ref)
        ok = ok and vac >= 0.99 and fid >= 0.95
        details.append(f"alpha={alpha:.4f}: vac={vac:.6f} fid={fid:.6f}")
    return ok, "; ".join(details)


def check_psi_alpha_variance(level):
    n = 40 if level == "fast" else 100
    dims = EnsembleDims(n)
    worst = 0.0
    for alpha in (np.pi / 50, np.pi / 25):
        spec = exact_circuits.AlphaSpec(alpha)
        em = dicke.energy_moments(exact_circuits.excited_branch(dims, spec))
        formula = (3 * n - 2) / 4 * np.sin(2 * alpha) ** 2
        worst = max(worst, abs(em.variance - formula) / formula)
        state = exact_circuits.psi_alpha(dims, spec)
        leak = network.extract_excitation_profile(state).leakage
        if leak > 0.02:
            return False, f"leakage {leak:.3e} exceeds 0.02"
    return worst < 0.05, f"max relative variance defect {worst:.3e}"


# ---------------------------------------------------------------------------
# sequential backend
# ---------------------------------------------------------------------------

def check_sequential_formula(level):
    rng = np.random.default_rng(108)
    trials = 10 if level == "fast" else 100
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(6, 13))
        k = int(rng.integers(1, n - 2))
        thetas = rng.uniform(0.05, np.pi - 0.05, size=k)
        circ = sequential.profile_circuit(n, thetas)
        sim = sequential.sequential_populations(sequential.simulate(circ), n)
        formula = sequential.profile_probabilities(thetas, n)
        worst = max(worst, np.abs(sim - formula).max())
    return worst < 1e-12, f"max product-formula defect {worst:.3e} over {trials} draws"


def check_sequential_circuits(level):
    n = 10
    eig = sequential.eigenstate_circuit(n, 6)
    p_eig = sequential.sequential_populations(sequential.simulate(eig), n)
    ok = len(eig.gates) == 5 and abs(p_eig[6] - 1.0) < 1e-12
    clk = sequential.clock_circuit(n, 4, 8)
    p_clk = sequential.sequential_populations(sequential.simulate(clk), n)
    ok = ok and abs(p_clk[4] - 0.5) < 1e-12 and abs(p_clk[8] - 0.5) < 1e-12
    # vacuum invariance
    for circ in (eig, clk):
        vac = sequential.simulate(circ, start_ell=0)
        ok = ok and abs(abs(vac[0]) - 1.0) < 1e-12
    return ok, f"eigenstate p6={p_eig[6]:.12f}, clock p4={p_clk[4]:.12f} p8={p_clk[8]:.12f}"


# ---------------------------------------------------------------------------
# measurement oracles
# ---------------------------------------------------------------------------

def check_parity_oracle(level):
    rng = np.random.default_rng(109)
    trials, n_max = (25, 8) if level == "fast" else (200, 12)
    worst = 0.0
    for _ in range(trials):
        dims, evolved, u_p, ctx, phi0, t = _random_ideal_scenario(rng, n_max)
        w = network.extract_excitation_profile(evolved).weights
        analytic = measurement.signal_nonlocal_analytic(w, ctx, phi0, t)
        oracle = measurement.oracle_beam_splitter_parity(evolved)
        worst = max(worst, abs(analytic - oracle))
    return worst < 1e-10, f"max |analytic - oracle| {worst:.3e} over {trials} trials"


def check_quadrature_oracle(level):
    rng = np.random.default_rng(110)
    trials, n_max = (25, 8) if level == "fast" else (200, 12)
    worst = 0.0
    for _ in range(trials):
        dims, evolved, u_p, ctx, phi0, t = _random_ideal_scenario(rng, n_max)
        w = network.extract_excitation_profile(evolved).weights
        analytic = measurement.signal_local_analytic(w, ctx, phi0, t)
        oracle = measurement.oracle_quadrature_product(evolved, u_p.dagger())
        worst = max(worst, abs(analytic - oracle))
    return worst < 1e-10, f"max |analytic - oracle| {worst:.3e} over {trials} trials"


def check_q_matrix_elements(level):
    n = 8
    dims = EnsembleDims(n)
    worst = 0.0
    for ell in range(1, 7):
        for ellp in range(1, 7):
            for sigma in (+1, -1):
                for sigmap in (+1, -1):
                    bra = np.zeros((n + 1, n + 1), dtype=complex)
                    bra[0, ell] = 1 / np.sqrt(2)
                    bra[ell, 0] = sigma / np.sqrt(2)
                    ket = np.zeros((n + 1, n + 1), dtype=complex)
                    ket[0, ellp] = 1 / np.sqrt(2)
                    ket[ellp, 0] = sigmap / np.sqrt(2)
                    q = measurement._quadrature_matrix(n + 2)
                    pad = np.zeros((n + 3, n + 3), dtype=complex)
                    pad[: n + 1, : n + 1] = ket
                    padb = np.zeros((n + 3, n + 3), dtype=complex)
                    padb[: n + 1, : n + 1] = bra
                    val = np.sum(np.conj(padb) * (q @ pad @ q.T))
                    expected = (sigma / 2) if (ell == 1 and ell == ellp and sigma == sigmap) else 0.0
                    worst = max(worst, abs(val - expected))
    return worst < 1e-12, f"max matrix-element defect {worst:.3e}"


def check_position_observable(level):
    rng = np.random.default_rng(111)
    worst = 0.0
    for _ in range(10):
        dims, evolved, u_p, ctx, phi0, t = _random_ideal_scenario(rng, 8)
        w = network.extract_excitation_profile(evolved).weights
        analytic = measurement.signal_nonlocal_analytic(w, ctx, phi0, t)
        worst = max(worst, abs(measurement.position_observable_expectation(evolved) - analytic))
    return worst < 1e-12, f"max |position - Eq.9| {worst:.3e}"


def check_phi0_offset(level):
    ctx = GravityContext(omega_eg=1e4, c=1.0, g=1e-4, delta_z=1.0)
    t = np.linspace(0, 12, 400)
    w = np.zeros(7)
    w[3], w[5] = 0.5, 0.5
    worst = 0.0
    delta = 0.9
    for fn, arg_shift in (
        (measurement.signal_nonlocal_analytic, delta),
        (measurement.signal_local_analytic, delta),
    ):
        shifted = fn(w, ctx, 1.1 + delta, t)
        # shifting phi0 by delta shifts every cosine argument by -delta
        base = fn(w, ctx, 1.1, t + 0 * t)
        ells = np.arange(7)
        ph_b = np.multiply.outer(ells, gravity.redshift_phase(ctx, 1, "B", t))
        ph_a = np.multiply.outer(ells, gravity.redshift_phase(ctx, 1, "A", t))
        if fn is measurement.signal_nonlocal_analytic:
            direct = np.tensordot(w, np.cos(ph_b - ph_a - 1.1 - delta), axes=(0, 0))
        else:
            fb = np.tensordot(w, np.exp(-1j * ph_b), axes=(0, 0))
            fa = np.tensordot(w, np.exp(-1j * ph_a), axes=(0, 0))
            direct = 0.5 * np.real(np.exp(1j * (1.1 + delta)) * fb * np.conj(fa))
        worst = max(worst, np.abs(shifted - direct).max())
    return worst < 1e-12, f"max phi0-offset defect {worst:.3e}"


def check_truncation_independence(level):
    rng = np.random.default_rng(112)
    worst = 0.0
    for _ in range(5):
        dims, evolved, u_p, ctx, phi0, t = _random_ideal_scenario(rng, 8)
        n = dims.n_atoms
        a = measurement.oracle_quadrature_product(evolved, u_p.dagger(), n_max=n + 1)
        b = measurement.oracle_quadrature_product(evolved, u_p.dagger(), n_max=n + 4)
        worst = max(worst, abs(a - b))
    return worst < 1e-12, f"max truncation defect {worst:.3e}"


def check_envelope_fit(level):
    tau0 = 2.0
    t = np.linspace(0, 3.0, 6001)
    trace = InterferenceTrace(t, np.cos(40.0 * t) * np.exp(-((t / tau0) ** 2)))
    tau = measurement.envelope_fit(trace)
    err = abs(tau - tau0) / tau0
    return err < 0.02, f"synthetic tau relative error {err:.3e}"


def check_mutation_sanity(level):
    """A deliberately sign-flipped Eq. 9 must disagree with the parity oracle."""
    rng = np.random.default_rng(113)
    worst_flip = 0.0
    for _ in range(5):
        dims, evolved, u_p, ctx, phi0, t = _random_ideal_scenario(rng, 8)
        w = network.extract_excitation_profile(evolved).weights
        ells = np.arange(w.size)
        ph_b = ells * gravity.redshift_phase(ctx, 1, "B", t)
        ph_a = ells * gravity.redshift_phase(ctx, 1, "A", t)
        flipped = float(w @ np.cos(ph_b + ph_a - phi0))  # sign flip on phi_{ell,A}
        worst_flip = max(worst_flip, abs(flipped - measurement.oracle_beam_splitter_parity(evolved)))
    return worst_flip > 1e-6, f"flipped formula deviates by {worst_flip:.3e} (must be > 1e-6)"


def check_serialization(level):
    rng = np.random.default_rng(114)
    dims = EnsembleDims(5)
    amps = rng.normal(size=6) + 1j * rng.normal(size=6)
    psi = DickeState(amps / np.linalg.norm(amps))
    worst = np.abs(
        serialize.dicke_state_from_text(serialize.dicke_state_to_text(psi)).amplitudes - psi.amplitudes
    ).max()
    u = dicke.rotation(dims, CollectiveAxis.from_angles(0.3, 1.2), 0.77)
    worst = max(worst, np.abs(serialize.unitary_from_text(serialize.unitary_to_text(u)).matrix - u.matrix).max())
    state = network.seed_state(dims, SeedSpec(phi0=0.3, infidelity=0.05))
    worst = max(
        worst,
        np.abs(
            serialize.two_node_state_from_text(serialize.two_node_state_to_text(state)).amplitudes
            - state.amplitudes
        ).max(),
    )
    circ = sequential.clock_circuit(8, 3, 6)
    ok = serialize.circuit_from_text(serialize.circuit_to_text(circ)) == circ
    return ok and worst == 0.0, f"round-trip defect {worst:.3e}, circuit ok={ok}"


CHECKS = (
    ("dicke.spin-algebra", check_spin_algebra),
    ("dicke.gate-unitarity", check_gate_unitarity),
    ("dicke.rotation-covariance", check_rotation_covariance),
    ("dicke.expm-vs-pade", check_expm_cross),
    ("dicke.rotated-variance-identity", check_rotated_variance_identity),
    ("dicke.coherent-binomial", check_coherent_binomial),
    ("dicke.fidelity-overlap", check_fidelity_overlap),
    ("dicke.husimi-poles", check_husimi_poles),
    ("gravity.reference-shift", check_reference_shift),
    ("gravity.decoherence-scaling", check_decoherence_scaling),
    ("gravity.aci-beat", check_aci_beat),
    ("network.invariants", check_network_invariants),
    ("varprep.cost-invariances", check_cost_invariances),
    ("varprep.kernel-agreement", check_kernel_agreement),
    ("varprep.reproducibility", check_optimize_reproducibility),
    ("exact.udt-closed-form", check_udt_closed_form),
    ("exact.qfi", check_qfi),
    ("exact.v-alpha", check_v_alpha),
    ("exact.psi-alpha-variance", check_psi_alpha_variance),
    ("sequential.product-formula", check_sequential_formula),
    ("sequential.circuits", check_sequential_circuits),
    ("measurement.parity-oracle", check_parity_oracle),
    ("measurement.quadrature-oracle", check_quadrature_oracle),
    ("measurement.q-matrix-elements", check_q_matrix_elements),
    ("measurement.position-observable", check_position_observable),
    ("measurement.phi0-offset", check_phi0_offset),
    ("measurement.truncation-independence", check_truncation_independence),
    ("measurement.envelope-fit", check_envelope_fit),
    ("measurement.mutation-sanity", check_mutation_sanity),
    ("serialize.round-trips", check_serialization),
)


def run_checks(level: str = "fast"):
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn(level)
        except Exception as err:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(err).__name__}: {err}"
        results.append(CheckResult(name, bool(ok), detail))
    return results


def format_report(results, level: str) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"verification level: {level}", ""]
    for r in results:
        lines.append(f"{'PASS' if r.ok else 'FAIL'}  {r.name.ljust(width)}  {r.detail}")
    n_fail = sum(not r.ok for r in results)
    lines.append("")
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
