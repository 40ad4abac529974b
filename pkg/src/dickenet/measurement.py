"""Interference signals of the non-local Ramsey protocol, plus brute-force oracles.

Two independent routes to every signal:

* analytic -- the closed-form expressions in terms of the ideal-sector weights
  |psi_ell|^2 and the redshift phases.  For leaky states these are *defined* on
  the projected ideal-sector profile.
* oracle -- direct Fock-space simulation of the physical readout: memories map
  to photon modes (excitation number = photon number), then either a 50/50
  beam splitter followed by photon-number parity, or per-node q-quadrature
  homodyne after decoding.  Oracles handle the full state including leakage;
  any gap between the routes is a leakage diagnostic, not an error.

The beam splitter is applied exactly, blockwise in the conserved total photon
number, with coefficients from exact combinatorics; the quadrature route uses
truncated q matrices (q only couples n to n+-1, so cutoff N+2 is exact and the
tests assert cutoff independence rather than assuming it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.optimize

from .errors import DomainError
from .gravity import GravityContext, InterferenceTrace, redshift_phase
from .network import (
    ExcitationProfile,
    TwoNodeState,
    apply_local,
    evolve_gravity,
    extract_excitation_profile,
)
from .dicke import SymmetricUnitary


# ---------------------------------------------------------------------------
# analytic signals
# ---------------------------------------------------------------------------

def _weights(profile) -> np.ndarray:
    if isinstance(profile, ExcitationProfile):
        w = profile.weights
    else:
        w = np.asarray(profile, dtype=float)
    if w.ndim != 1:
        raise DomainError(f"profile weights must be a vector indexed by ell, got shape {w.shape}")
    if w[0] != 0.0:
        w = w.copy()
        w[0] = 0.0  # only ell >= 1 carries signal
    total = float(w.sum())
    if total > 1.0 + 1e-9:
        raise DomainError(f"profile weights must sum to at most 1, got {total!r}")
    return w


def _branch_phases(ctx: GravityContext, n_ell: int, t):
    ells = np.arange(n_ell)
    ph_a = np.multiply.outer(ells, redshift_phase(ctx, 1, "A", t))
    ph_b = np.multiply.outer(ells, redshift_phase(ctx, 1, "B", t))
    return ph_a, ph_b


def signal_nonlocal_analytic(profile, ctx: GravityContext, phi0: float, t):
    """Parity signal I = sum_{ell>=1} |psi_ell|^2 cos(phi_{ell,B} - phi_{ell,A} - phi0)."""
    w = _weights(profile)
    ph_a, ph_b = _branch_phases(ctx, w.size, t)
    out = np.tensordot(w, np.cos(ph_b - ph_a - phi0), axes=(0, 0))
    return float(out) if np.ndim(out) == 0 else out


def signal_local_analytic(profile, ctx: GravityContext, phi0: float, t):
    """Quadrature-product signal I = (1/2) sum_{l,l'>=1} |psi_l|^2 |psi_l'|^2 cos(phi_{l,B} - phi_{l',A} - phi0).

    Unlike the non-local signal, the cross terms depend on where the lab-frame
    clock sits (the context's reference node), not only on the potential
    difference.
    """
    w = _weights(profile)
    ph_a, ph_b = _branch_phases(ctx, w.size, t)
    f_b = np.tensordot(w, np.exp(-1j * ph_b), axes=(0, 0))
    f_a = np.tensordot(w, np.exp(-1j * ph_a), axes=(0, 0))
    out = 0.5 * np.real(np.exp(1j * phi0) * f_b * np.conj(f_a))
    return float(out) if np.ndim(out) == 0 else out


def position_observable_expectation(psi: TwoNodeState) -> float:
    """Expectation of the which-path observable sum_{ell>=1} (P_{ell,+} - P_{ell,-}).

    P_{ell,+-} project on (|0,ell> +- |ell,0>)/sqrt(2); components outside the
    ideal sector contribute zero, so this is well defined on leaky states.
    """
    amp = psi.amplitudes
    return float(2.0 * np.sum(np.real(np.conj(amp[0, 1:]) * amp[1:, 0])))


# ---------------------------------------------------------------------------
# Fock-space oracles
# ---------------------------------------------------------------------------

DEFAULT_EXTRA_PHOTONS = 2  # default cutoff n_max = N + 2


@dataclass(frozen=True)
class TwoModeFockState:
    """Photonic two-mode state on a truncated number basis, indexed [n_A, n_B]."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex)
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        if amp.ndim != 2 or amp.shape[0] != amp.shape[1]:
            raise DomainError(f"amplitudes must be square, got shape {amp.shape}")
        norm = float(np.sum(np.abs(amp) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"state not normalized: sum |Psi|^2 = {norm!r}")

    @property
    def n_max(self) -> int:
        return self.amplitudes.shape[0] - 1


def _resolve_n_max(psi: TwoNodeState, n_max: int | None) -> int:
    n = psi.n_atoms
    if n_max is None:
        n_max = n + DEFAULT_EXTRA_PHOTONS
    if n_max < n + 1:
        raise DomainError(f"n_max must be at least N+1 = {n + 1}, got {n_max}")
    return n_max


def embed_two_node(psi: TwoNodeState, n_max: int | None = None) -> TwoModeFockState:
    """Read both memories into photon channels: excitation number becomes photon number."""
    n_max = _resolve_n_max(psi, n_max)
    amp = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    dim = psi.n_atoms + 1
    amp[:dim, :dim] = psi.amplitudes
    return TwoModeFockState(amp)


@lru_cache(maxsize=None)
def _beam_splitter_block(total: int) -> np.ndarray:
    """Exact 50/50 beam-splitter block on the total-photon-number-``total`` subspace.

    Row p, column n_A: amplitude to scatter |n_A, total-n_A> into the output
    state with p photons in port 1 and total-p in port 2, for the transfer
    a^dag_A -> (a^dag_1 + a^dag_2)/sqrt(2), a^dag_B -> (a^dag_1 - a^dag_2)/sqrt(2).
    Coefficients are exact rationals under the square root.
    """
    block = np.zeros((total + 1, total + 1))
    for n_a in range(total + 1):
        n_b = total - n_a
        for p in range(total + 1):
            q = total - p
            coeff = 0
            for j in range(max(0, p - n_b), min(n_a, p) + 1):
                k = p - j
                coeff += (-1) ** (n_b - k) * math.comb(n_a, j) * math.comb(n_b, k)
            if coeff:
                weight = Fraction(
                    math.factorial(p) * math.factorial(q),
                    math.factorial(n_a) * math.factorial(n_b) * 2**total,
                )
                block[p, n_a] = coeff * math.sqrt(float(weight))
    block.setflags(write=False)
    return block


def oracle_beam_splitter_parity(psi: TwoNodeState, n_max: int | None = None) -> float:
    """Non-local readout oracle: beam splitter, then <(-1)^{N_2}> on output port 2.

    Photon number is conserved per block, so the splitter is applied exactly on
    every total-number sector of the input (no truncation enters).
    """
    _resolve_n_max(psi, n_max)
    amp = psi.amplitudes
    n = psi.n_atoms
    expectation = 0.0
    for total in range(2 * n + 1):
        lo, hi = max(0, total - n), min(n, total)
        in_vec = np.zeros(total + 1, dtype=complex)
        in_vec[lo : hi + 1] = [amp[j, total - j] for j in range(lo, hi + 1)]
        if not np.any(in_vec):
            continue
        out = _beam_splitter_block(total) @ in_vec
        parity = (-1.0) ** (total - np.arange(total + 1))
        expectation += float(parity @ (np.abs(out) ** 2))
    return expectation


@lru_cache(maxsize=None)
def _quadrature_matrix(n_max: int) -> np.ndarray:
    """q = (a + a^dag)/sqrt(2) on the truncated number basis."""
    q = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max):
        q[n, n + 1] = q[n + 1, n] = np.sqrt(n + 1.0) / np.sqrt(2.0)
    q.setflags(write=False)
    return q


def quadrature_product_expectation(fock: TwoModeFockState) -> float:
    """<q_A q_B> on a two-mode Fock state."""
    q = _quadrature_matrix(fock.n_max)
    amp = fock.amplitudes
    return float(np.real(np.sum(np.conj(amp) * (q @ amp @ q.T))))


def oracle_quadrature_product(psi: TwoNodeState, u_m: SymmetricUnitary, n_max: int | None = None) -> float:
    """Local readout oracle: decode with U_m (x) U_m, read out, measure <q_A q_B>."""
    n_max = _resolve_n_max(psi, n_max)
    decoded = apply_local(u_m, u_m, psi)
    return quadrature_product_expectation(embed_two_node(decoded, n_max))


# ---------------------------------------------------------------------------
# protocol driver
# ---------------------------------------------------------------------------

SCHEME_KINDS = ("nonlocal_parity", "local_quadrature", "position_observable")


@dataclass(frozen=True)
class MeasurementScheme:
    """Readout choice; the local scheme needs the decoder U_m = U_p^dagger."""

    kind: str
    decoder: SymmetricUnitary | None = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise DomainError(f"scheme kind must be one of {SCHEME_KINDS}, got {self.kind!r}")
        if self.kind == "local_quadrature" and self.decoder is None:
            raise DomainError("local_quadrature needs a decoder unitary")
        if self.kind != "local_quadrature" and self.decoder is not None:
            raise DomainError(f"{self.kind} takes no decoder")


def run_ramsey(
    state: TwoNodeState,
    ctx: GravityContext,
    scheme: MeasurementScheme,
    times,
    phi0: float = 0.0,
    method: str = "analytic",
) -> InterferenceTrace:
    """Prepare -> evolve under gravity -> decode -> measure, for every time on the grid.

    ``method`` selects the route: "analytic" evaluates the closed-form signal
    on the state's ideal-sector profile (phi0 is the seed phase it assumes);
    "oracle" runs the Fock-space readout on the full evolved state.
    """
    times = np.asarray(times, dtype=float)
    if method == "analytic":
        profile = extract_excitation_profile(state)
        if scheme.kind == "local_quadrature":
            signal = signal_local_analytic(profile, ctx, phi0, times)
        else:
            signal = signal_nonlocal_analytic(profile, ctx, phi0, times)
        return InterferenceTrace(times, signal)
    if method != "oracle":
        raise DomainError(f"method must be 'analytic' or 'oracle', got {method!r}")
    signal = np.empty(times.size)
    for i, t in enumerate(times):
        evolved = evolve_gravity(state, ctx, float(t))
        if scheme.kind == "nonlocal_parity":
            signal[i] = oracle_beam_splitter_parity(evolved)
        elif scheme.kind == "local_quadrature":
            signal[i] = oracle_quadrature_product(evolved, scheme.decoder)
        else:
            signal[i] = position_observable_expectation(evolved)
    return InterferenceTrace(times, signal)


# ---------------------------------------------------------------------------
# trace analysis
# ---------------------------------------------------------------------------

def _refined_maxima(times: np.ndarray, values: np.ndarray):
    """Local maxima of a sampled curve, refined by quadratic interpolation."""
    peaks_t, peaks_v = [], []
    for i in range(1, values.size - 1):
        if values[i] > values[i - 1] and values[i] >= values[i + 1]:
            y0, y1, y2 = values[i - 1], values[i], values[i + 1]
            denom = y0 - 2 * y1 + y2
            if denom < 0:
                shift = 0.5 * (y0 - y2) / denom
                dt = times[i + 1] - times[i]
                peaks_t.append(times[i] + shift * dt)
                peaks_v.append(y1 - 0.25 * (y0 - y2) * shift)
            else:
                peaks_t.append(times[i])
                peaks_v.append(y1)
    return np.array(peaks_t), np.array(peaks_v)


REVIVAL_RTOL = 1e-6  # a maximum exceeding its predecessor by this marks revival onset


def envelope_maxima(trace: InterferenceTrace):
    """Refined local maxima of |I|, truncated at the first revival."""
    t, v = _refined_maxima(trace.times, np.abs(trace.signal))
    cut = v.size
    for k in range(1, v.size):
        if v[k] > v[k - 1] * (1.0 + REVIVAL_RTOL):
            cut = k
            break
    return t[:cut], v[:cut], cut < v.size


ENVELOPE_FIT_FLOOR = np.exp(-1.0)


def envelope_fit(trace: InterferenceTrace, floor: float = ENVELOPE_FIT_FLOOR) -> float:
    """Fit the pre-revival contrast maxima of |I| to exp(-(T/tau)^2); returns tau.

    Only the initial decay enters: maxima below ``floor`` times the largest
    maximum are dropped, since real mass distributions are discrete and
    slightly skewed, so the deep tail departs from the Gaussian model.  Needs
    at least four usable maxima (the trace must cover a few oscillation
    periods); a non-decaying trace fits to infinity.
    """
    t, v, _ = envelope_maxima(trace)
    if v.size:
        keep = v > max(float(v.max()) * floor, 1e-12)
        t, v = t[keep], v[keep]
    if t.size < 4:
        raise DomainError(f"too few contrast maxima before the first revival ({t.size})")
    # log v = a - (t/tau)^2, linear least squares with intercept
    design = np.column_stack([np.ones_like(t), -(t**2)])
    coeffs, *_ = np.linalg.lstsq(design, np.log(v), rcond=None)
    slope = float(coeffs[1])
    if slope * float(t[-1]) ** 2 < 1e-6:  # no measurable decay across the window
        return float("inf")
    return 1.0 / np.sqrt(slope)


def dominant_frequency(trace: InterferenceTrace) -> float:
    """Angular frequency (rad/s) of the strongest spectral line, to sub-bin accuracy.

    An FFT locates the peak bin on the uniform grid; the frequency is then
    refined by minimizing the residual of a least-squares single-harmonic fit
    (cosine, sine, constant), which is leakage-free and pins a clean tone many
    orders of magnitude below the bin width.
    """
    t = trace.times
    dt = float(t[1] - t[0])
    if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=0.0):
        raise DomainError("dominant_frequency needs a uniform time grid")
    y = trace.signal
    spectrum = np.abs(np.fft.rfft(y - y.mean()))
    if spectrum.size < 3:
        raise DomainError("trace too short for a spectral estimate")
    bin_idx = int(np.argmax(spectrum[1:]) + 1)
    d_omega = 2.0 * np.pi / (t.size * dt)

    def harmonic_residual(omega):
        design = np.column_stack([np.cos(omega * t), np.sin(omega * t), np.ones_like(t)])
        coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
        r = y - design @ coeffs
        return float(r @ r)

    res = scipy.optimize.minimize_scalar(
        harmonic_residual,
        bounds=(max(bin_idx - 1, 0.25) * d_omega, (bin_idx + 1) * d_omega),
        method="bounded",
        options={"xatol": 1e-11 * d_omega, "maxiter": 200},
    )
    return float(res.x)
