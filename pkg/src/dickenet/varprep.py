"""Variational compilation of the excitation amplifier from twisting + rotation layers.

The circuit ansatz is p one-axis-twisting layers with free axes followed by one
global rotation; it is optimized so the vacuum |0> stays put while |1> acquires
a target mass distribution.  Only distribution moduli enter the cost: relative
phases between excitation numbers never show up in the interference signals.

The raw ansatz has 3p+3 parameters.  Costs are invariant under z-rotations
both appended and prepended to the circuit (|0> and |1> are S_z eigenstates),
which removes two: the optimizer works in a reduced 3p+1 space where the first
twist axis and the final rotation axis have zero azimuth.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import _kernels
from .dicke import (
    CollectiveAxis,
    DickeState,
    EnsembleDims,
    SymmetricUnitary,
    _sy_eig,
    apply,
    dicke_basis_state,
    oat,
    rotation,
)
from .errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VariationalAnsatz:
    """p twisting layers (axis, chi) and a final rotation (axis, theta)."""

    layers: tuple
    final_axis: CollectiveAxis
    final_angle: float

    def __post_init__(self):
        layers = tuple((axis, float(chi)) for axis, chi in self.layers)
        object.__setattr__(self, "layers", layers)
        if len(layers) < 1:
            raise DomainError("ansatz needs at least one twisting layer")

    @property
    def n_layers(self) -> int:
        return len(self.layers)


def build_circuit(dims: EnsembleDims, ansatz: VariationalAnsatz) -> SymmetricUnitary:
    """R_{n_r}(theta_r) T_{n_p}(chi_p) ... T_{n_1}(chi_1); rightmost layer acts first."""
    u = np.eye(dims.dim, dtype=complex)
    for axis, chi in ansatz.layers:
        u = oat(dims, axis, chi).matrix @ u
    u = rotation(dims, ansatz.final_axis, ansatz.final_angle).matrix @ u
    return SymmetricUnitary(u)


# ---------------------------------------------------------------------------
# cost functions
# ---------------------------------------------------------------------------

def _vacuum_and_excitation_columns(u: SymmetricUnitary | np.ndarray):
    mat = u.matrix if isinstance(u, SymmetricUnitary) else u
    return mat[:, 0], mat[:, 1]


def cost_target(u_p: SymmetricUnitary, target: DickeState, lam: float = 1.0) -> float:
    """-|<0|U|0>|^2 - lam * sum_{ell>=1} |<ell|target>| |<ell|U|1>|; bounded below by -(1+lam)."""
    col0, col1 = _vacuum_and_excitation_columns(u_p)
    if target.amplitudes.size != col0.size:
        raise DomainError("target dimension does not match circuit")
    overlap = float(np.abs(target.amplitudes[1:]) @ np.abs(col1[1:]))
    return -abs(col0[0]) ** 2 - lam * overlap


def cost_energy(u_p: SymmetricUnitary, lam1: float = 1.0, lam2: float = 0.0) -> float:
    """-|<0|U|0>|^2 - lam1 <S_z>/N - lam2 sqrt(Var S_z)/N, moments taken on U|1>."""
    if lam1 < 0 or lam2 < 0:
        raise DomainError("lam1 and lam2 must be non-negative")
    col0, col1 = _vacuum_and_excitation_columns(u_p)
    n = col0.size - 1
    m = np.arange(n + 1) - n / 2
    p = np.abs(col1) ** 2
    mean = float(m @ p)
    var = max(float((m**2) @ p - mean**2), 0.0)
    return -abs(col0[0]) ** 2 - lam1 * mean / n - lam2 * np.sqrt(var) / n


@dataclass(frozen=True)
class CostSpec:
    """Which cost drives the search: a target distribution or energy moments."""

    kind: str
    target: DickeState | None = None
    lam: float = 1.0
    lam1: float = 1.0
    lam2: float = 0.0

    def __post_init__(self):
        if self.kind == "target_distribution":
            if self.target is None:
                raise DomainError("target_distribution cost needs a target state")
            if not self.lam > 0:
                raise DomainError(f"lam must be positive, got {self.lam!r}")
        elif self.kind == "energy_moments":
            if self.target is not None:
                raise DomainError("energy_moments cost takes no target state")
            if self.lam1 < 0 or self.lam2 < 0:
                raise DomainError("lam1 and lam2 must be non-negative")
        else:
            raise DomainError(f"unknown cost kind {self.kind!r}")

    def evaluate(self, u_p: SymmetricUnitary) -> float:
        if self.kind == "target_distribution":
            return cost_target(u_p, self.target, self.lam)
        return cost_energy(u_p, self.lam1, self.lam2)


@dataclass(frozen=True)
class OptimizerConfig:
    """Search budget: ``max_evals`` caps cost evaluations per restart.

    Each restart iterates Nelder-Mead to convergence and then makes ``hops``
    seeded jumps (accepting only improvements) within its budget; the twisting
    landscape has many shallow optima and plain single-pass NM stalls well
    short of the good basins.
    """

    restarts: int = 20
    max_evals: int = 30000
    simplex_tol: float = 1e-10
    seed: int = 0
    hops: int = 4

    def __post_init__(self):
        if self.restarts < 1:
            raise DomainError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_evals < 1:
            raise DomainError(f"max_evals must be >= 1, got {self.max_evals}")
        if self.hops < 0:
            raise DomainError(f"hops must be >= 0, got {self.hops}")


# ---------------------------------------------------------------------------
# reduced parameterization and fast column evaluation
# ---------------------------------------------------------------------------

def n_reduced_params(p: int) -> int:
    return 3 * p + 1


def params_to_ansatz(params: np.ndarray, p: int) -> VariationalAnsatz:
    """Unpack the reduced vector [b1,x1, (b,g,x)*, br,tr] into a full ansatz.

    The first twist axis and the final rotation axis sit in the x-z plane
    (azimuth 0); the dropped azimuths are pure gauge for every cost.
    """
    params = np.asarray(params, dtype=float)
    if params.size != n_reduced_params(p):
        raise DomainError(f"expected {n_reduced_params(p)} parameters for p={p}, got {params.size}")
    layers = [(CollectiveAxis.from_angles(params[0], 0.0), params[1])]
    for i in range(p - 1):
        b, g, x = params[2 + 3 * i : 5 + 3 * i]
        layers.append((CollectiveAxis.from_angles(b, g), x))
    b_r, theta_r = params[-2:]
    return VariationalAnsatz(tuple(layers), CollectiveAxis.from_angles(b_r, 0.0), theta_r)


def _circuit_columns(dims: EnsembleDims, ansatz: VariationalAnsatz) -> np.ndarray:
    """Columns 0 and 1 of the circuit, via the cached S_y eigenbasis.

    Each layer is A f(S_z) A^dag with A = R_z(gamma) R_y(beta) and R_y applied
    in the fixed S_y eigenbasis: the same eigendecomposition route as the
    public gates, but with no per-axis diagonalization or matrix build.
    """
    n = dims.n_atoms
    w_sy, v_sy = _sy_eig(n)
    v_sy_h = v_sy.conj().T
    m = np.arange(n + 1) - n / 2
    block = np.zeros((n + 1, 2), dtype=complex)
    block[0, 0] = 1.0
    block[1, 1] = 1.0

    def conjugated_phase_layer(block, beta, gamma, z_phases):
        # A f A^dag block with A = R_z(gamma) R_y(beta), f = diag(z_phases)
        zg = np.exp(-1j * gamma * m)[:, None]
        yb = np.exp(-1j * beta * w_sy)[:, None]
        x = v_sy @ (yb.conj() * (v_sy_h @ (zg.conj() * block)))  # A^dag block
        x = v_sy @ (yb * (v_sy_h @ (z_phases[:, None] * x)))
        return zg * x

    for axis, chi in ansatz.layers:
        block = conjugated_phase_layer(block, axis.polar, axis.azimuth, np.exp(-1j * chi * m**2))
    axis = ansatz.final_axis
    return conjugated_phase_layer(
        block, axis.polar, axis.azimuth, np.exp(-1j * ansatz.final_angle * m)
    )


def _cost_of_columns(block: np.ndarray, cost: CostSpec) -> float:
    col0, col1 = block[:, 0], block[:, 1]
    if cost.kind == "target_distribution":
        overlap = float(np.abs(cost.target.amplitudes[1:]) @ np.abs(col1[1:]))
        return -abs(col0[0]) ** 2 - cost.lam * overlap
    n = col0.size - 1
    m = np.arange(n + 1) - n / 2
    p = np.abs(col1) ** 2
    mean = float(m @ p)
    var = max(float((m**2) @ p - mean**2), 0.0)
    return -abs(col0[0]) ** 2 - cost.lam1 * mean / n - cost.lam2 * np.sqrt(var) / n


class _NonFiniteCost(RuntimeError):
    pass


@dataclass(frozen=True)
class RestartRecord:
    restart: int
    n_evals: int
    cost: float
    aborted: bool = False


@dataclass(frozen=True)
class OptimizeResult:
    ansatz: VariationalAnsatz
    cost: float
    params: np.ndarray
    restart: int
    trace: tuple = field(default_factory=tuple)


def _initial_point(rng: np.random.Generator, p: int) -> np.ndarray:
    # chi uniform in [0, pi], axes uniform on the sphere, theta uniform in [0, 2pi)
    def polar():
        return float(np.arccos(rng.uniform(-1.0, 1.0)))

    x = [polar(), rng.uniform(0.0, np.pi)]
    for _ in range(p - 1):
        x.extend([polar(), rng.uniform(0.0, 2 * np.pi), rng.uniform(0.0, np.pi)])
    x.extend([polar(), rng.uniform(0.0, 2 * np.pi)])
    return np.array(x)


_DESCENT_WIDTHS = (0.9, 0.3, 0.1, 0.03, 0.01)
_HOP_WIDTHS = (0.5, 0.12, 0.03)
_HOP_SCALE = 1.2
_STALL_TOL = 1e-10


class _Budget:
    def __init__(self, total: int):
        self.left = total

    def chunk(self) -> int:
        return min(max(500, self.left // 6), self.left)

    def spend(self, n: int):
        self.left -= n


def _nelder_mead(objective, x0: np.ndarray, max_evals: int, width: float, tol: float):
    # wide custom initial simplex: the default 5% simplex is far too timid for
    # angle landscapes
    n = x0.size
    simplex = np.vstack([x0] + [x0 + width * row for row in np.eye(n)])
    return scipy.optimize.minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "maxfev": max_evals,
            "xatol": tol,
            "fatol": tol,
            "adaptive": True,
            "initial_simplex": simplex,
        },
    )


def _descend(objective, x0, widths, budget: _Budget, tol: float):
    """Iterated Nelder-Mead at shrinking simplex widths until stall or budget out."""
    x, f = np.asarray(x0, dtype=float), float("inf")
    evals = 0
    for width in widths:
        if budget.left <= 0:
            break
        res = _nelder_mead(objective, x, budget.chunk(), width, tol)
        budget.spend(int(res.nfev))
        evals += int(res.nfev)
        improved = f - res.fun > _STALL_TOL
        if res.fun < f:
            x, f = np.asarray(res.x, dtype=float), float(res.fun)
        if not improved and np.isfinite(f):
            break
    return x, f, evals


def _restart_search(objective, x0, rng, config: OptimizerConfig):
    budget = _Budget(config.max_evals)
    x, f, evals = _descend(objective, x0, _DESCENT_WIDTHS, budget, config.simplex_tol)
    for _ in range(config.hops):
        if budget.left <= 0:
            break
        x_try = x + rng.normal(0.0, _HOP_SCALE, size=x.size)
        x2, f2, used = _descend(objective, x_try, _HOP_WIDTHS, budget, config.simplex_tol)
        evals += used
        if f2 < f - _STALL_TOL:
            x, f = x2, f2
    return x, f, evals


def optimize(dims: EnsembleDims, cost: CostSpec, p: int, config: OptimizerConfig) -> OptimizeResult:
    """Nelder-Mead search from seeded random restarts over the reduced 3p+1 parameters.

    Deterministic for a fixed config seed: all initial points and per-restart
    hop streams are drawn up front, restarts run in a fixed order (they are
    independent and could run concurrently), and ties break toward the
    earliest restart.  A restart whose cost turns non-finite is logged and
    skipped.
    """
    if p < 1:
        raise DomainError(f"need at least one layer, got p={p}")
    rng = np.random.default_rng(config.seed)
    starts = [_initial_point(rng, p) for _ in range(config.restarts)]
    hop_seeds = rng.integers(0, 2**63, size=config.restarts)

    fast = _kernels.make_objective(dims.n_atoms, p, cost)

    def objective(x):
        if fast is not None:
            value = fast(x)
        else:
            value = _cost_of_columns(_circuit_columns(dims, params_to_ansatz(x, p)), cost)
        if not np.isfinite(value):
            raise _NonFiniteCost(f"cost {value!r}")
        return value

    best: tuple[float, int, np.ndarray] | None = None
    trace = []
    for r, x0 in enumerate(starts):
        try:
            x, f, evals = _restart_search(objective, x0, np.random.default_rng(hop_seeds[r]), config)
        except _NonFiniteCost as err:
            logger.warning("restart %d aborted: %s", r, err)
            trace.append(RestartRecord(r, 0, float("nan"), aborted=True))
            continue
        trace.append(RestartRecord(r, evals, f))
        if best is None or f < best[0]:
            best = (f, r, x)
    if best is None:
        raise DomainError("every restart aborted with a non-finite cost")
    cost_val, restart, params = best
    return OptimizeResult(
        ansatz=params_to_ansatz(params, p),
        cost=cost_val,
        params=params,
        restart=restart,
        trace=tuple(trace),
    )


# ---------------------------------------------------------------------------
# target families
# ---------------------------------------------------------------------------

def mass_eigenstate(dims: EnsembleDims, m: int) -> DickeState:
    """Single mass eigenstate |M>."""
    if not 1 <= m <= dims.n_atoms:
        raise DomainError(f"eigenstate index {m} out of range 1..{dims.n_atoms}")
    return dicke_basis_state(dims, m)


def clock(dims: EnsembleDims, m1: int, m2: int) -> DickeState:
    """Clock superposition (|M1> + |M2>)/sqrt(2) of two mass eigenstates."""
    if not (1 <= m1 < m2 <= dims.n_atoms):
        raise DomainError(f"need 1 <= M1 < M2 <= {dims.n_atoms}, got {m1}, {m2}")
    amp = np.zeros(dims.dim, dtype=complex)
    amp[m1] = amp[m2] = 1.0 / np.sqrt(2.0)
    return DickeState(amp)


def coherent(dims: EnsembleDims) -> DickeState:
    """Coherent spin state R_y(pi/2)|0> with binomial mass distribution."""
    return apply(rotation(dims, CollectiveAxis.y(), np.pi / 2), dicke_basis_state(dims, 0))
