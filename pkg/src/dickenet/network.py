"""Two-node tensor-product states: seeds, parallel local unitaries, gravity evolution.

States live on the full (N+1)^2 product basis |ell_A, ell_B> rather than the
2N+1-dimensional "ideal" sector span{|0,ell>, |ell,0>}: variationally compiled
amplifiers only approximately preserve the vacuum, and the population that
leaks out of the ideal sector must be representable and measurable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dicke import DickeState, EnsembleDims, NORM_ATOL, SymmetricUnitary
from .errors import DomainError
from .gravity import GravityContext, redshift_phase


@dataclass(frozen=True)
class SeedSpec:
    """Initial phase and quality of the distributed Bell-type seed.

    ``infidelity`` is the weight of a |0,0> admixture modeling imperfect
    entanglement distribution (the dominant failure of heralded schemes).
    """

    phi0: float = 0.0
    infidelity: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.infidelity < 1.0:
            raise DomainError(f"infidelity must lie in [0, 1), got {self.infidelity!r}")


@dataclass(frozen=True)
class TwoNodeState:
    """Normalized amplitudes over the (N+1)x(N+1) product basis, indexed [ell_A, ell_B]."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex)
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        if amp.ndim != 2 or amp.shape[0] != amp.shape[1] or amp.shape[0] < 2:
            raise DomainError(f"amplitudes must be a square (N+1)x(N+1) array, got shape {amp.shape}")
        norm = float(np.sum(np.abs(amp) ** 2))
        if abs(norm - 1.0) > NORM_ATOL:
            raise DomainError(f"state not normalized: sum |Psi|^2 = {norm!r}")

    @property
    def n_atoms(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def dims(self) -> EnsembleDims:
        return EnsembleDims(self.n_atoms)

    def overlap(self, other: "TwoNodeState") -> complex:
        if other.amplitudes.shape != self.amplitudes.shape:
            raise DomainError("dimension mismatch between states")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def node_mass_distribution(self, node: str) -> np.ndarray:
        """Excitation-number distribution of one node's reduced state."""
        p = np.abs(self.amplitudes) ** 2
        if node == "A":
            return p.sum(axis=1)
        if node == "B":
            return p.sum(axis=0)
        raise DomainError(f"node must be 'A' or 'B', got {node!r}")


def seed_state(dims: EnsembleDims, spec: SeedSpec = SeedSpec()) -> TwoNodeState:
    """Bell-type seed (|0,1> + e^{-i phi0} |1,0>)/sqrt(2), with optional |0,0> admixture."""
    amp = np.zeros((dims.dim, dims.dim), dtype=complex)
    good = np.sqrt(1.0 - spec.infidelity) / np.sqrt(2.0)
    amp[0, 1] = good
    amp[1, 0] = good * np.exp(-1j * spec.phi0)
    amp[0, 0] = np.sqrt(spec.infidelity)
    return TwoNodeState(amp)


def apply_local(u_a: SymmetricUnitary, u_b: SymmetricUnitary, psi: TwoNodeState) -> TwoNodeState:
    """(U_A (x) U_B)|Psi>, applied as per-node contractions (no (N+1)^2-squared matrix)."""
    dim = psi.amplitudes.shape[0]
    if u_a.dim != dim or u_b.dim != dim:
        raise DomainError(f"dimension mismatch: unitaries {u_a.dim}, {u_b.dim} vs state {dim}")
    return TwoNodeState(u_a.matrix @ psi.amplitudes @ u_b.matrix.T)


def evolve_gravity(psi: TwoNodeState, ctx: GravityContext, t: float) -> TwoNodeState:
    """Free evolution for lab time t: amplitude (ell_A, ell_B) picks up e^{-i(phi_{ell_A,A} + phi_{ell_B,B})}."""
    n = psi.n_atoms
    ells = np.arange(n + 1)
    # redshift_phase is linear in ell; evaluate per-ell arrays directly
    ph_a = ells * redshift_phase(ctx, 1, "A", t)
    ph_b = ells * redshift_phase(ctx, 1, "B", t)
    phases = np.exp(-1j * (ph_a[:, None] + ph_b[None, :]))
    return TwoNodeState(psi.amplitudes * phases)


@dataclass(frozen=True)
class ExcitationProfile:
    """Projection of a two-node state onto the ideal sector span{|0,ell>, |ell,0>: ell >= 1}.

    ``weights[ell]`` = |<0,ell|Psi>|^2 + |<ell,0|Psi>|^2 (entry 0 is always 0);
    for an ideal superposition this recovers |psi_ell|^2.  ``leakage`` is the
    population outside the sector, including any |0,0> component.
    """

    weights: np.ndarray
    leakage: float
    branch_b: np.ndarray  # <0,ell|Psi> for ell >= 1 (excitation at node B)
    branch_a: np.ndarray  # <ell,0|Psi> for ell >= 1 (excitation at node A)


def extract_excitation_profile(psi: TwoNodeState) -> ExcitationProfile:
    amp = psi.amplitudes
    branch_b = amp[0, 1:].copy()
    branch_a = amp[1:, 0].copy()
    weights = np.zeros(psi.n_atoms + 1)
    weights[1:] = np.abs(branch_b) ** 2 + np.abs(branch_a) ** 2
    leakage = float(1.0 - weights.sum())
    return ExcitationProfile(weights=weights, leakage=leakage, branch_b=branch_b, branch_a=branch_a)


def exact_amplifier(dims: EnsembleDims, target: DickeState) -> SymmetricUnitary:
    """A unitary with U|0> = |0> and U|1> = |target>, for targets with no vacuum component.

    Columns beyond the first two are a deterministic Gram-Schmidt completion;
    they never enter ideal-sector signals.
    """
    if target.amplitudes.size != dims.dim:
        raise DomainError("target dimension does not match dims")
    if abs(target.amplitudes[0]) > 1e-10:
        raise DomainError(
            f"target must have no vacuum component, |<0|psi>| = {abs(target.amplitudes[0])!r}"
        )
    dim = dims.dim
    cols = [np.eye(dim, dtype=complex)[:, 0]]
    psi = target.amplitudes.astype(complex).copy()
    psi[0] = 0.0
    psi /= np.linalg.norm(psi)
    cols.append(psi)
    for k in range(1, dim):
        if len(cols) == dim:
            break
        v = np.eye(dim, dtype=complex)[:, k]
        for c in cols:
            v = v - np.vdot(c, v) * c
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            cols.append(v / norm)
    if len(cols) != dim:
        raise DomainError("failed to complete an orthonormal basis around the target")
    return SymmetricUnitary(np.column_stack(cols))
