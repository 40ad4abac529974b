"""Gravitational-redshift phases, decoherence timescale, and clock-interferometer beats.

The only general-relativistic effect modeled is the redshift coupling of
internal energy to the local gravitational potential: an ell-excitation state
held at potential phi accumulates phase ell * (omega_eg/c^2) * phi * T.
Potentials are re-referenced internally so the configured lab-frame clock node
sits at zero potential; only the potential difference enters relative phases,
but the zero point matters for the local quadrature readout, which is why the
reference node is explicit configuration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.constants
import scipy.ndimage

from .errors import DomainError

HBAR = scipy.constants.hbar
C_LIGHT = scipy.constants.c
G_STANDARD = scipy.constants.g

_NODES = ("A", "B")
_REFERENCES = ("A", "B", "midpoint")


@dataclass(frozen=True)
class GravityContext:
    """Potentials and frequencies defining the redshift phases of a two-node network.

    Either give ``delta_z`` (then phi_B - phi_A defaults to g*delta_z) or give
    both potentials explicitly.  ``reference_node`` fixes where the lab-frame
    clock sits; potentials are shifted so that node has zero potential.
    """

    omega_eg: float
    delta_z: float | None = None
    g: float = G_STANDARD
    c: float = C_LIGHT
    phi_a: float | None = None
    phi_b: float | None = None
    reference_node: str = "A"

    def __post_init__(self):
        if not self.omega_eg > 0:
            raise DomainError(f"omega_eg must be positive, got {self.omega_eg!r}")
        if not self.c > 0:
            raise DomainError(f"c must be positive, got {self.c!r}")
        if self.reference_node not in _REFERENCES:
            raise DomainError(f"reference_node must be one of {_REFERENCES}, got {self.reference_node!r}")
        if self.phi_a is None and self.phi_b is None:
            if self.delta_z is None:
                raise DomainError("give either delta_z or both phi_a and phi_b")
            object.__setattr__(self, "phi_a", 0.0)
            object.__setattr__(self, "phi_b", self.g * self.delta_z)
        elif self.phi_a is None or self.phi_b is None:
            raise DomainError("phi_a and phi_b must be given together")
        worst = max(abs(self.phi_a), abs(self.phi_b)) / self.c**2
        if worst > 1e-3:
            warnings.warn(
                f"|phi|/c^2 = {worst:.3e} is outside the weak-field regime the model assumes",
                stacklevel=2,
            )

    @property
    def delta_phi(self) -> float:
        """Potential difference phi_B - phi_A (defaults to g*delta_z)."""
        return self.phi_b - self.phi_a

    @property
    def mass_defect(self) -> float:
        """m_eg = hbar*omega_eg/c^2, the mass carried by one excitation."""
        return HBAR * self.omega_eg / self.c**2

    @property
    def phase_rate(self) -> float:
        """Redshift phase per excitation per unit potential per second: omega_eg/c^2."""
        return self.omega_eg / self.c**2

    def shifted_potential(self, node: str) -> float:
        """Potential at a node after re-referencing to the lab-frame clock."""
        if node not in _NODES:
            raise DomainError(f"node must be 'A' or 'B', got {node!r}")
        if self.reference_node == "midpoint":
            shift = 0.5 * (self.phi_a + self.phi_b)
        else:
            shift = self.phi_a if self.reference_node == "A" else self.phi_b
        return (self.phi_a if node == "A" else self.phi_b) - shift


def redshift_phase(ctx: GravityContext, ell: int, node: str, t) -> float:
    """Phase ell * (omega_eg/c^2) * phi(node) * T accumulated by an ell-excitation state.

    ``t`` may be a scalar or array of lab-frame coordinate times (seconds).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    if ell < 0:
        raise DomainError(f"excitation number must be non-negative, got {ell}")
    out = ell * ctx.phase_rate * ctx.shifted_potential(node) * t
    return float(out) if out.ndim == 0 else out


def decoherence_time(ctx: GravityContext, delta_e: float) -> float:
    """Gravitational dephasing timescale sqrt(2) hbar c^2 / (Delta-E g Delta-z).

    ``delta_e`` is the energy spread in joules.  The product g*Delta-z is taken
    as |phi_B - phi_A|, which coincides with it for height-configured contexts.
    """
    if not delta_e > 0:
        raise DomainError(f"energy spread must be positive, got {delta_e!r}")
    dphi = abs(ctx.delta_phi)
    if dphi == 0.0:
        return float("inf")
    return np.sqrt(2.0) * HBAR * ctx.c**2 / (delta_e * dphi)


def gaussian_envelope(t, tau: float):
    """Interference-contrast envelope exp(-(T/tau)^2)."""
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau!r}")
    t = np.asarray(t, dtype=float)
    out = np.exp(-((t / tau) ** 2))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class InterferenceTrace:
    """Interferometric signal I(T) sampled on a lab-frame time grid."""

    times: np.ndarray
    signal: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        signal = np.asarray(self.signal, dtype=float)
        for name, arr in (("times", times), ("signal", signal)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if times.shape != signal.shape or times.ndim != 1:
            raise DomainError(f"times and signal must be equal-length vectors, got {times.shape} vs {signal.shape}")
        peak = float(np.abs(signal).max(initial=0.0))
        if peak > 1.0 + 1e-9:
            raise DomainError(f"|I| must stay <= 1, got max {peak!r}")

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class AciParams:
    """Effective mass and internal splitting of an emulated atom-clock interferometer."""

    m_eff: float
    omega_eff: float

    def __post_init__(self):
        if not self.m_eff > 0:
            raise DomainError(f"effective mass must be positive, got {self.m_eff!r}")

    @classmethod
    def from_excitations(cls, ctx: GravityContext, ell_down: int, ell_up: int) -> "AciParams":
        """Identify the clock-interferometer parameters carried by ell_down/ell_up excitations."""
        if ell_down < 1 or ell_up < ell_down:
            raise DomainError(f"need 1 <= ell_down <= ell_up, got {ell_down}, {ell_up}")
        return cls(m_eff=ell_down * ctx.mass_defect, omega_eff=(ell_up - ell_down) * ctx.omega_eg)


def aci_interference(aci: AciParams, ctx: GravityContext, times) -> InterferenceTrace:
    """Beat pattern I(T) = [cos(dOmega T) + cos((dOmega+domega) T)] / 2.

    hbar*dOmega = m_eff * delta_phi is the mass contribution and
    domega = (omega_eff/c^2) * delta_phi the internal-clock redshift beat.
    """
    times = np.asarray(times, dtype=float)
    d_omega_mass = aci.m_eff * ctx.delta_phi / HBAR
    d_omega_clock = aci.omega_eff * ctx.delta_phi / ctx.c**2
    signal = 0.5 * (np.cos(d_omega_mass * times) + np.cos((d_omega_mass + d_omega_clock) * times))
    return InterferenceTrace(times, signal)


def aci_visibility(trace: InterferenceTrace, window: float) -> np.ndarray:
    """Sliding-window visibility (I_max - I_min)/2, one value per trace sample.

    ``window`` is the full window length in seconds and should span at least
    two fast-oscillation periods; it must cover several sampling steps.
    """
    if len(trace) < 3:
        raise DomainError("trace too short for a sliding window")
    dt = float(np.median(np.diff(trace.times)))
    half = int(round(window / (2.0 * dt)))
    if half < 1:
        raise DomainError(f"window {window!r} s does not cover the sampling step {dt!r} s")
    size = 2 * half + 1
    hi = scipy.ndimage.maximum_filter1d(trace.signal, size=size, mode="nearest")
    lo = scipy.ndimage.minimum_filter1d(trace.signal, size=size, mode="nearest")
    return (hi - lo) / 2.0
