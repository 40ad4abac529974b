"""Exact linear algebra for one node's symmetric (Dicke) subspace.

An ensemble of N two-level atoms under collective addressing stays in the
(N+1)-dimensional symmetric subspace, equivalent to one spin S = N/2.  Basis
states are indexed by the excitation number ell = 0..N, so |ell> is the Dicke
state |S, -S+ell>: index 0 is the all-ground "vacuum" and index N the fully
excited state.  Every module in this package uses this one index convention.

Gates carry their exact global phase: a rotation is e^{-i theta S_n} and a
one-axis twist is e^{-i chi S_n^2}, computed by eigendecomposition of the
Hermitian generator.  State comparisons should therefore go through
:func:`fidelity`, never amplitude equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import scipy.constants

from .errors import DomainError

NORM_ATOL = 1e-12      # |sum |psi_l|^2 - 1| tolerance for states
UNITARY_ATOL = 1e-10   # max-abs entrywise tolerance for U^dag U - 1


@dataclass(frozen=True)
class EnsembleDims:
    """Size of one node: N atoms, total spin S = N/2, Dicke dimension N+1."""

    n_atoms: int

    def __post_init__(self):
        if not isinstance(self.n_atoms, (int, np.integer)) or self.n_atoms < 1:
            raise DomainError(f"n_atoms must be a positive integer, got {self.n_atoms!r}")

    @property
    def spin(self) -> float:
        return self.n_atoms / 2

    @property
    def dim(self) -> int:
        return self.n_atoms + 1


def _frozen_array(obj, name: str, value) -> np.ndarray:
    arr = np.array(value, dtype=complex)
    arr.setflags(write=False)
    object.__setattr__(obj, name, arr)
    return arr


@dataclass(frozen=True)
class DickeState:
    """Normalized amplitude vector over the Dicke basis of one node.

    ``amplitudes[ell]`` is the amplitude on |ell> = |S, -S+ell>.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = _frozen_array(self, "amplitudes", self.amplitudes)
        if amp.ndim != 1 or amp.size < 2:
            raise DomainError(f"amplitudes must be a vector of length N+1 >= 2, got shape {amp.shape}")
        norm = float(np.sum(np.abs(amp) ** 2))
        if abs(norm - 1.0) > NORM_ATOL:
            raise DomainError(f"state not normalized: sum |psi|^2 = {norm!r}")

    @property
    def n_atoms(self) -> int:
        return self.amplitudes.size - 1

    @property
    def dims(self) -> EnsembleDims:
        return EnsembleDims(self.n_atoms)

    def overlap(self, other: "DickeState") -> complex:
        """<self|other>."""
        if other.amplitudes.size != self.amplitudes.size:
            raise DomainError("dimension mismatch between states")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class CollectiveAxis:
    """Unit vector on the Bloch sphere defining a collective spin direction."""

    direction: np.ndarray

    def __post_init__(self):
        vec = np.array(self.direction, dtype=float)
        vec.setflags(write=False)
        object.__setattr__(self, "direction", vec)
        if vec.shape != (3,):
            raise DomainError(f"axis must be a 3-vector, got shape {vec.shape}")
        if abs(np.linalg.norm(vec) - 1.0) > 1e-12:
            raise DomainError(f"axis must be a unit vector, |n| = {np.linalg.norm(vec)!r}")

    @classmethod
    def x(cls) -> "CollectiveAxis":
        return cls(np.array([1.0, 0.0, 0.0]))

    @classmethod
    def y(cls) -> "CollectiveAxis":
        return cls(np.array([0.0, 1.0, 0.0]))

    @classmethod
    def z(cls) -> "CollectiveAxis":
        return cls(np.array([0.0, 0.0, 1.0]))

    @classmethod
    def from_angles(cls, polar: float, azimuth: float) -> "CollectiveAxis":
        st = np.sin(polar)
        return cls(np.array([st * np.cos(azimuth), st * np.sin(azimuth), np.cos(polar)]))

    @property
    def polar(self) -> float:
        return float(np.arccos(np.clip(self.direction[2], -1.0, 1.0)))

    @property
    def azimuth(self) -> float:
        return float(np.arctan2(self.direction[1], self.direction[0]))


@dataclass(frozen=True)
class SymmetricUnitary:
    """Unitary acting within one node's symmetric subspace."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen_array(self, "matrix", self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DomainError(f"matrix must be square, got shape {mat.shape}")
        defect = np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])).max()
        if defect > UNITARY_ATOL:
            raise DomainError(f"matrix is not unitary: max |U^dag U - 1| = {defect!r}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "SymmetricUnitary":
        return SymmetricUnitary(self.matrix.conj().T)

    def __matmul__(self, other: "SymmetricUnitary") -> "SymmetricUnitary":
        if other.dim != self.dim:
            raise DomainError("dimension mismatch between unitaries")
        return SymmetricUnitary(self.matrix @ other.matrix)

    @classmethod
    def identity(cls, dims: EnsembleDims) -> "SymmetricUnitary":
        return cls(np.eye(dims.dim, dtype=complex))


# ---------------------------------------------------------------------------
# spin operators and gates
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _spin_xyz(n_atoms: int):
    s = n_atoms / 2
    m = np.arange(n_atoms + 1) - s
    sz = np.diag(m).astype(complex)
    sp = np.zeros((n_atoms + 1, n_atoms + 1))
    for ell in range(n_atoms):
        sp[ell + 1, ell] = np.sqrt((s - m[ell]) * (s + m[ell] + 1))
    sx = ((sp + sp.T) / 2).astype(complex)
    sy = ((sp - sp.T) / (2j)).astype(complex)
    for op in (sx, sy, sz):
        op.setflags(write=False)
    return sx, sy, sz


def collective_spin(dims: EnsembleDims, axis: CollectiveAxis) -> np.ndarray:
    """Collective spin operator S_n = n_x S_x + n_y S_y + n_z S_z in the spin-S irrep."""
    sx, sy, sz = _spin_xyz(dims.n_atoms)
    nx, ny, nz = axis.direction
    return nx * sx + ny * sy + nz * sz


def _expm_generator(h: np.ndarray, phases_of_eigs) -> np.ndarray:
    # exp of i*f(H) for Hermitian H via eigendecomposition; exact at these dims
    w, v = np.linalg.eigh(h)
    return (v * phases_of_eigs(w)) @ v.conj().T


def rotation(dims: EnsembleDims, axis: CollectiveAxis, theta: float) -> SymmetricUnitary:
    """Large-spin rotation e^{-i theta S_n}."""
    if not np.isfinite(theta):
        raise DomainError(f"rotation angle must be finite, got {theta!r}")
    h = collective_spin(dims, axis)
    return SymmetricUnitary(_expm_generator(h, lambda w: np.exp(-1j * theta * w)))


def oat(dims: EnsembleDims, axis: CollectiveAxis, chi: float) -> SymmetricUnitary:
    """One-axis twisting e^{-i chi S_n^2}."""
    if not np.isfinite(chi):
        raise DomainError(f"twisting angle must be finite, got {chi!r}")
    h = collective_spin(dims, axis)
    return SymmetricUnitary(_expm_generator(h, lambda w: np.exp(-1j * chi * w**2)))


def dicke_basis_state(dims: EnsembleDims, ell: int) -> DickeState:
    """|ell>: the Dicke state with exactly ell excited atoms."""
    if not 0 <= ell <= dims.n_atoms:
        raise DomainError(f"excitation number {ell} out of range 0..{dims.n_atoms}")
    amp = np.zeros(dims.dim, dtype=complex)
    amp[ell] = 1.0
    return DickeState(amp)


def apply(u: SymmetricUnitary, psi: DickeState) -> DickeState:
    """U|psi>. Norm is preserved by unitarity; the result is validated, not renormalized."""
    if u.dim != psi.amplitudes.size:
        raise DomainError(f"dimension mismatch: unitary dim {u.dim}, state dim {psi.amplitudes.size}")
    return DickeState(u.matrix @ psi.amplitudes)


# ---------------------------------------------------------------------------
# state functionals
# ---------------------------------------------------------------------------

def mass_distribution(psi: DickeState) -> np.ndarray:
    """Probability p_ell = |psi_ell|^2 of finding ell excitations (ell excess masses m_eg)."""
    return np.abs(psi.amplitudes) ** 2


class EnergyMoments(NamedTuple):
    """Internal-energy mean and variance in units of hbar*omega_eg and (hbar*omega_eg)^2."""

    mean: float
    variance: float
    omega_eg: float

    @property
    def std_joules(self) -> float:
        return scipy.constants.hbar * self.omega_eg * np.sqrt(max(self.variance, 0.0))


def energy_moments(psi: DickeState, omega_eg: float = 1.0) -> EnergyMoments:
    """Mean and variance of the excitation number, i.e. of the internal energy.

    The returned numbers multiply hbar*omega_eg (mean) and (hbar*omega_eg)^2
    (variance); ``std_joules`` converts the spread to SI for decoherence-time
    estimates.
    """
    p = mass_distribution(psi)
    ell = np.arange(p.size, dtype=float)
    mean = float(ell @ p)
    var = float((ell**2) @ p - mean**2)
    return EnergyMoments(mean, var, omega_eg)


@lru_cache(maxsize=None)
def _sy_eig(n_atoms: int):
    _, sy, _ = _spin_xyz(n_atoms)
    w, v = np.linalg.eigh(sy)
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def _rotated_south_pole(n_atoms: int, theta: float) -> np.ndarray:
    # R_y(theta)|0> from the cached S_y eigendecomposition (one matvec)
    w, v = _sy_eig(n_atoms)
    return v @ (np.exp(-1j * theta * w) * v[0, :].conj())


def coherent_state(dims: EnsembleDims, theta: float, phi: float) -> DickeState:
    """Spin-coherent state |theta, phi> = e^{-i phi S_z} e^{-i theta S_y} |0>."""
    amp = _rotated_south_pole(dims.n_atoms, theta)
    ell = np.arange(dims.dim) - dims.spin
    return DickeState(np.exp(-1j * phi * ell) * amp)


def husimi_q(psi: DickeState, grid) -> np.ndarray:
    """Husimi quasiprobability Q(theta, phi) = |<theta, phi|psi>|^2 on the given sphere points.

    ``grid`` is a sequence of (theta, phi) pairs; returns one value in [0, 1]
    per point.
    """
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    if pts.shape[-1] != 2:
        raise DomainError(f"grid must be a list of (theta, phi) pairs, got shape {pts.shape}")
    n = psi.n_atoms
    ell = np.arange(n + 1) - n / 2
    out = np.empty(pts.shape[0])
    for i, (theta, phi) in enumerate(pts):
        coh = np.exp(-1j * phi * ell) * _rotated_south_pole(n, theta)
        out[i] = abs(np.vdot(coh, psi.amplitudes)) ** 2
    return out


def fidelity(a: DickeState, b: DickeState) -> float:
    """|<a|b>|^2."""
    return abs(a.overlap(b)) ** 2
