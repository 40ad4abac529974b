"""Closed-form preparation circuits: double twisting, energy tuning, and their products.

For even atom number N, two orthogonal-axis twists form a state-controlled
reflection in the S_z eigenbasis: even-ell Dicke states keep a phase, odd-ell
states map to |N-ell>.  Acting on the Bell seed this produces the highly
excited non-local cat (|0,N-1> + e^{-i phi0}|N-1,0>)/sqrt(2); a further tuned
twist rotates only the excited branch, dialing in the energy variance that
sets the gravitational dephasing rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .dicke import CollectiveAxis, DickeState, EnsembleDims, SymmetricUnitary, _sy_eig, oat, rotation
from .errors import DomainError, UnsupportedConfigurationError
from .network import SeedSpec, TwoNodeState, apply_local, seed_state


def _require_even(dims: EnsembleDims, what: str):
    if dims.n_atoms % 2 != 0:
        raise UnsupportedConfigurationError(f"{what} is implemented for even atom number only, got N={dims.n_atoms}")


def u_dt(dims: EnsembleDims) -> SymmetricUnitary:
    """Double-twisting unitary T_y(+-pi/2) T_x(pi/2); sign +- set by the parity of S = N/2."""
    _require_even(dims, "double twisting")
    sign = +1.0 if (dims.n_atoms // 2) % 2 == 1 else -1.0
    return oat(dims, CollectiveAxis.y(), sign * np.pi / 2) @ oat(dims, CollectiveAxis.x(), np.pi / 2)


def u_dt_positive_angle(dims: EnsembleDims) -> SymmetricUnitary:
    """Positive-twisting-angle realization: R_y(pi) T_y(pi/2) T_x(pi/2) when S is even.

    Equals :func:`u_dt` up to a global phase; for odd S the signed form is
    already positive and is returned unchanged.
    """
    _require_even(dims, "double twisting")
    if (dims.n_atoms // 2) % 2 == 1:
        return u_dt(dims)
    return (
        rotation(dims, CollectiveAxis.y(), np.pi)
        @ oat(dims, CollectiveAxis.y(), np.pi / 2)
        @ oat(dims, CollectiveAxis.x(), np.pi / 2)
    )


def u_dt_closed_form(dims: EnsembleDims) -> SymmetricUnitary:
    """The double twist written directly as a phased reflection.

    e^{i pi/4 ((-1)^S - 1)} on even ell (diagonal) and
    e^{i pi/4 (3 - (-1)^S)} on |N-ell><ell| for odd ell.
    """
    _require_even(dims, "double twisting")
    n = dims.n_atoms
    s = n // 2
    parity = (-1) ** s
    phase_even = np.exp(1j * np.pi / 4 * (parity - 1))
    phase_odd = np.exp(1j * np.pi / 4 * (3 - parity))
    mat = np.zeros((n + 1, n + 1), dtype=complex)
    for ell in range(n + 1):
        if ell % 2 == 0:
            mat[ell, ell] = phase_even
        else:
            mat[n - ell, ell] = phase_odd
    return SymmetricUnitary(mat)


def noon_minus_one(dims: EnsembleDims, spec: SeedSpec = SeedSpec()) -> TwoNodeState:
    """(U_DT (x) U_DT) applied to the seed: the NOON-1 cat up to branch-global phases."""
    u = u_dt(dims)
    return apply_local(u, u, seed_state(dims, spec))


def qfi_differential_phase(psi: TwoNodeState) -> float:
    """Quantum Fisher information 4 Var(G) for the differential phase, G = (S_z^A - S_z^B)/2.

    The generator normalization is a fixed convention of this package; it makes
    the NOON-1 cat score (N-1)^2 and the full NOON state N^2.
    """
    n = psi.n_atoms
    ells = np.arange(n + 1, dtype=float)
    g = (ells[:, None] - ells[None, :]) / 2.0  # (S_z^A - S_z^B)/2 is diagonal here
    p = np.abs(psi.amplitudes) ** 2
    mean = float(np.sum(g * p))
    second = float(np.sum(g**2 * p))
    return 4.0 * (second - mean**2)


@dataclass(frozen=True)
class AlphaSpec:
    """Rotation angle and twist-branch index of the energy-tuning unitary."""

    alpha: float
    k: int = 0

    def __post_init__(self):
        if abs(np.cos(self.alpha)) < 1e-12:
            raise DomainError(f"cos(alpha) must be nonzero, got alpha={self.alpha!r}")

    def chi(self, dims: EnsembleDims) -> float:
        two_s = dims.n_atoms  # 2S
        return (1 + 2 * self.k) * np.pi / (2 * (two_s - 1) * np.cos(self.alpha))


def v_alpha(dims: EnsembleDims, spec: AlphaSpec) -> SymmetricUnitary:
    """Energy-tuning unitary R_f T_z(chi) R_y(alpha) with vacuum-restoring final rotation.

    R_f = R_y(-a') R_z(zeta) is found by maximizing |<0| R_f T_z(chi) R_y(alpha) |0>|
    numerically, starting from the mean-field guess (a', zeta) = (alpha, 2 chi S cos alpha).
    The net action on |N-1> is a y-rotation by 2*alpha in magnitude.
    """
    _require_even(dims, "energy tuning")
    n = dims.n_atoms
    s = dims.spin
    chi = spec.chi(dims)
    core = oat(dims, CollectiveAxis.z(), chi) @ rotation(dims, CollectiveAxis.y(), spec.alpha)
    w0 = core.matrix[:, 0]
    m = np.arange(n + 1) - s
    w_sy, v_sy = _sy_eig(n)

    def neg_vacuum_overlap(x):
        a_prime, zeta = x
        bra = v_sy @ (np.exp(-1j * a_prime * w_sy) * v_sy[0, :].conj())  # R_y(a')|0>
        return -abs(np.vdot(bra, np.exp(-1j * zeta * m) * w0))

    x0 = np.array([spec.alpha, 2.0 * chi * s * np.cos(spec.alpha)])
    res = scipy.optimize.minimize(
        neg_vacuum_overlap,
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxfev": 8000},
    )
    a_prime, zeta = res.x
    r_f = rotation(dims, CollectiveAxis.y(), -a_prime) @ rotation(dims, CollectiveAxis.z(), zeta)
    return r_f @ core


def psi_alpha(dims: EnsembleDims, spec: AlphaSpec, seed: SeedSpec = SeedSpec()) -> TwoNodeState:
    """(V_alpha (x) V_alpha) |NOON-1>: spatial superposition of a tunable high-energy excitation."""
    v = v_alpha(dims, spec)
    return apply_local(v, v, noon_minus_one(dims, seed))


def excited_branch(dims: EnsembleDims, spec: AlphaSpec):
    """The per-node excited branch V_alpha|N-1>, whose energy spread sets the dephasing rate."""
    from .dicke import DickeState

    v = v_alpha(dims, spec)
    return DickeState(v.matrix[:, dims.n_atoms - 1])
