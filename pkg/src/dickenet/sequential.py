"""Qubit backend for nodes with individual control: the sequential-excitations subspace.

Here |ell> means the first ell qubits excited (|e..e g..g>), so preparation
circuits decompose into few-qubit gates controlled on already-excited qubits.
Qubit labels are 1-based throughout, matching the serialized gate format; the
first qubit carries the distributed entanglement, so every circuit leaves the
all-ground state untouched.

A brute-force 2^n statevector simulator (n <= 20) provides the oracle against
which the analytic probability product formula is checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

MAX_QUBITS = 20

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class QubitGate:
    kind: str  # CNOT | CH | CRY
    control: int
    target: int
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in ("CNOT", "CH", "CRY"):
            raise DomainError(f"unknown gate kind {self.kind!r}")
        if self.kind == "CRY" and self.theta is None:
            raise DomainError("CRY gate needs an angle")
        if self.kind != "CRY" and self.theta is not None:
            raise DomainError(f"{self.kind} gate takes no angle")
        if self.control == self.target:
            raise DomainError("control and target must differ")

    def matrix(self) -> np.ndarray:
        if self.kind == "CNOT":
            return _X
        if self.kind == "CH":
            return _H
        return _ry(self.theta)


@dataclass(frozen=True)
class QubitCircuit:
    n_qubits: int
    gates: tuple

    def __post_init__(self):
        if not 2 <= self.n_qubits <= MAX_QUBITS:
            raise DomainError(f"n_qubits must be in 2..{MAX_QUBITS}, got {self.n_qubits}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            for q in (gate.control, gate.target):
                if not 1 <= q <= self.n_qubits:
                    raise DomainError(f"qubit index {q} out of range 1..{self.n_qubits}")


# ---------------------------------------------------------------------------
# circuit builders (gate lists read left to right in application order)
# ---------------------------------------------------------------------------

def eigenstate_circuit(n_qubits: int, ell: int) -> QubitCircuit:
    """CNOT chain from the first qubit: |1> -> |ell>, vacuum untouched."""
    if not 1 <= ell <= n_qubits:
        raise DomainError(f"excitation number {ell} out of range 1..{n_qubits}")
    gates = [QubitGate("CNOT", 1, j) for j in range(2, ell + 1)]
    return QubitCircuit(n_qubits, tuple(gates))


def clock_circuit(n_qubits: int, m1: int, m2: int) -> QubitCircuit:
    """CNOT chain to |m1>, controlled Hadamard, then a chain to |m2>: |1> -> (|m1>+|m2>)/sqrt(2)."""
    if not (1 <= m1 < m2 <= n_qubits):
        raise DomainError(f"need 1 <= m1 < m2 <= {n_qubits}, got {m1}, {m2}")
    gates = [QubitGate("CNOT", 1, j) for j in range(2, m1 + 1)]
    gates.append(QubitGate("CH", 1, m1 + 1))
    gates.extend(QubitGate("CNOT", m1 + 1, j) for j in range(m1 + 2, m2 + 1))
    return QubitCircuit(n_qubits, tuple(gates))


def profile_circuit(n_qubits: int, thetas) -> QubitCircuit:
    """Rotation cascade from |3>: |1> -> superposition of |3>..|K+3> for K angles.

    CNOT(1,2) and CNOT(2,3) reach three excitations; each CRY(j, j+1, theta)
    then splits off the amplitude that stays at j excitations.
    """
    thetas = tuple(float(t) for t in thetas)
    k = len(thetas)
    if k < 1:
        raise DomainError("need at least one rotation angle")
    if k + 3 > n_qubits:
        raise DomainError(f"{k} angles need at least {k + 3} qubits, got {n_qubits}")
    gates = [QubitGate("CNOT", 1, 2), QubitGate("CNOT", 2, 3)]
    gates.extend(QubitGate("CRY", 3 + i, 4 + i, theta=t) for i, t in enumerate(thetas))
    return QubitCircuit(n_qubits, tuple(gates))


def sequential_circuit(kind: str, n_qubits: int, **params) -> QubitCircuit:
    """Dispatch on circuit family: eigenstate(ell), clock(m1, m2), or profile(thetas)."""
    if kind == "eigenstate":
        return eigenstate_circuit(n_qubits, params["ell"])
    if kind == "clock":
        return clock_circuit(n_qubits, params["m1"], params["m2"])
    if kind == "profile":
        return profile_circuit(n_qubits, params["thetas"])
    raise DomainError(f"unknown sequential circuit kind {kind!r}")


def profile_probabilities(thetas, n_qubits: int) -> np.ndarray:
    """Analytic excitation distribution of the profile circuit applied to |1>.

    p_ell = cos^2(th_{ell-2}/2) * prod_{j < ell-2} sin^2(th_j/2) over the
    extended angle vector (pi, thetas..., 0): the leading pi is the CNOT that
    opens the cascade, the trailing 0 closes it with the sine remainder.
    """
    thetas = tuple(float(t) for t in thetas)
    k = len(thetas)
    if k + 3 > n_qubits:
        raise DomainError(f"{k} angles need at least {k + 3} qubits, got {n_qubits}")
    ext = np.concatenate(([np.pi], thetas, [0.0]))
    probs = np.zeros(n_qubits + 1)
    running = 1.0
    for i, theta in enumerate(ext):
        ell = 2 + i
        probs[ell] = running * np.cos(theta / 2.0) ** 2
        running *= np.sin(theta / 2.0) ** 2
    return probs


# ---------------------------------------------------------------------------
# brute-force statevector simulation
# ---------------------------------------------------------------------------

def _apply_controlled(state: np.ndarray, n: int, control: int, target: int, mat: np.ndarray) -> np.ndarray:
    psi = state.reshape([2] * n)
    c_ax, t_ax = control - 1, target - 1
    idx = [slice(None)] * n
    idx[c_ax] = 1
    sub = psi[tuple(idx)]
    sub_ax = t_ax if t_ax < c_ax else t_ax - 1
    rotated = np.moveaxis(np.tensordot(mat, sub, axes=([1], [sub_ax])), 0, sub_ax)
    psi = psi.copy()
    psi[tuple(idx)] = rotated
    return psi.reshape(-1)


def sequential_basis_index(n_qubits: int, ell: int) -> int:
    """Flat statevector index of |ell> = |e^ell g^(n-ell)> (qubit 1 is the most significant bit)."""
    if not 0 <= ell <= n_qubits:
        raise DomainError(f"excitation number {ell} out of range 0..{n_qubits}")
    return ((1 << ell) - 1) << (n_qubits - ell)


def simulate(circuit: QubitCircuit, start_ell: int = 1) -> np.ndarray:
    """Run the circuit on the sequential basis state |start_ell>; returns the 2^n statevector."""
    n = circuit.n_qubits
    state = np.zeros(2**n, dtype=complex)
    state[sequential_basis_index(n, start_ell)] = 1.0
    for gate in circuit.gates:
        state = _apply_controlled(state, n, gate.control, gate.target, gate.matrix().astype(complex))
    return state


def sequential_populations(state: np.ndarray, n_qubits: int) -> np.ndarray:
    """Populations on the sequential ladder |ell>, ell = 0..n.

    Raises if any population sits outside the ladder: the circuit families here
    never leave it.
    """
    if state.size != 2**n_qubits:
        raise DomainError("statevector size does not match n_qubits")
    probs = np.array([abs(state[sequential_basis_index(n_qubits, ell)]) ** 2 for ell in range(n_qubits + 1)])
    outside = 1.0 - probs.sum()
    if outside > 1e-10:
        raise DomainError(f"population {outside!r} outside the sequential-excitations subspace")
    return probs
