"""Structured-text and CSV persistence.

States and unitaries serialize as a header plus one row-major "(re, im)" pair
per line with 17 significant digits, which round-trips doubles exactly.  All
CSV outputs carry a comment header with the artifact version and a parameter
hash so runs are attributable and byte-reproducible.
"""

from __future__ import annotations

import numpy as np

from . import __version__
from .dicke import CollectiveAxis, DickeState, SymmetricUnitary
from .errors import DomainError
from .gravity import InterferenceTrace
from .network import TwoNodeState
from .sequential import QubitCircuit, QubitGate
from .varprep import VariationalAnsatz


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _pair(z: complex) -> str:
    return f"({_fmt(z.real)}, {_fmt(z.imag)})"


def _parse_pair(line: str, where: str) -> complex:
    text = line.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise DomainError(f"{where}: expected '(re, im)', got {line!r}")
    try:
        re_s, im_s = text[1:-1].split(",")
        return complex(float(re_s), float(im_s))
    except ValueError as err:
        raise DomainError(f"{where}: bad complex entry {line!r}") from err


def dicke_state_to_text(psi: DickeState) -> str:
    lines = ["dicke-state", f"dim {psi.amplitudes.size}"]
    lines.extend(_pair(z) for z in psi.amplitudes)
    return "\n".join(lines) + "\n"


def dicke_state_from_text(text: str) -> DickeState:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "dicke-state":
        raise DomainError("not a dicke-state document")
    dim = int(lines[1].split()[1])
    if len(lines) != 2 + dim:
        raise DomainError(f"expected {dim} entries, got {len(lines) - 2}")
    return DickeState(np.array([_parse_pair(ln, "dicke-state") for ln in lines[2:]]))


def unitary_to_text(u: SymmetricUnitary) -> str:
    lines = ["symmetric-unitary", f"dim {u.dim}"]
    lines.extend(_pair(z) for z in u.matrix.ravel())
    return "\n".join(lines) + "\n"


def unitary_from_text(text: str) -> SymmetricUnitary:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "symmetric-unitary":
        raise DomainError("not a symmetric-unitary document")
    dim = int(lines[1].split()[1])
    entries = [_parse_pair(ln, "symmetric-unitary") for ln in lines[2:]]
    if len(entries) != dim * dim:
        raise DomainError(f"expected {dim * dim} entries, got {len(entries)}")
    return SymmetricUnitary(np.array(entries).reshape(dim, dim))


def two_node_state_to_text(psi: TwoNodeState) -> str:
    lines = ["two-node-state", f"N {psi.n_atoms}", "ordering row-major A-major"]
    lines.extend(_pair(z) for z in psi.amplitudes.ravel())
    return "\n".join(lines) + "\n"


def two_node_state_from_text(text: str) -> TwoNodeState:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "two-node-state":
        raise DomainError("not a two-node-state document")
    n = int(lines[1].split()[1])
    if lines[2] != "ordering row-major A-major":
        raise DomainError(f"unknown ordering line {lines[2]!r}")
    dim = n + 1
    entries = [_parse_pair(ln, "two-node-state") for ln in lines[3:]]
    if len(entries) != dim * dim:
        raise DomainError(f"expected {dim * dim} entries, got {len(entries)}")
    return TwoNodeState(np.array(entries).reshape(dim, dim))


# ---------------------------------------------------------------------------
# qubit circuits: one gate per line
# ---------------------------------------------------------------------------

def circuit_to_text(circuit: QubitCircuit) -> str:
    lines = [f"qubits {circuit.n_qubits}"]
    for g in circuit.gates:
        if g.kind == "CRY":
            lines.append(f"CRY {g.control} {g.target} {_fmt(g.theta)}")
        else:
            lines.append(f"{g.kind} {g.control} {g.target}")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> QubitCircuit:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("qubits "):
        raise DomainError("not a qubit-circuit document")
    n = int(lines[0].split()[1])
    gates = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] in ("CNOT", "CH") and len(parts) == 3:
            gates.append(QubitGate(parts[0], int(parts[1]), int(parts[2])))
        elif parts[0] == "CRY" and len(parts) == 4:
            gates.append(QubitGate("CRY", int(parts[1]), int(parts[2]), theta=float(parts[3])))
        else:
            raise DomainError(f"bad gate line {ln!r}")
    return QubitCircuit(n, tuple(gates))


# ---------------------------------------------------------------------------
# variational circuits
# ---------------------------------------------------------------------------

def ansatz_to_text(
    n_atoms: int,
    ansatz: VariationalAnsatz,
    cost: float | None = None,
    seed: int | None = None,
    cost_spec: str | None = None,
) -> str:
    lines = ["variational-circuit", f"n_atoms {n_atoms}", f"layers {ansatz.n_layers}"]
    for axis, chi in ansatz.layers:
        lines.append(f"layer {_fmt(axis.polar)} {_fmt(axis.azimuth)} {_fmt(chi)}")
    lines.append(
        f"final {_fmt(ansatz.final_axis.polar)} {_fmt(ansatz.final_axis.azimuth)} {_fmt(ansatz.final_angle)}"
    )
    if cost is not None:
        lines.append(f"cost {_fmt(cost)}")
    if seed is not None:
        lines.append(f"seed {seed}")
    if cost_spec is not None:
        lines.append(f"cost-spec {cost_spec}")
    return "\n".join(lines) + "\n"


def ansatz_from_text(text: str):
    """Returns (n_atoms, ansatz, metadata dict with any of cost/seed/cost-spec)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "variational-circuit":
        raise DomainError("not a variational-circuit document")
    n_atoms = int(lines[1].split()[1])
    n_layers = int(lines[2].split()[1])
    layers = []
    idx = 3
    for _ in range(n_layers):
        tag, polar, azimuth, chi = lines[idx].split()
        if tag != "layer":
            raise DomainError(f"expected a layer line, got {lines[idx]!r}")
        layers.append((CollectiveAxis.from_angles(float(polar), float(azimuth)), float(chi)))
        idx += 1
    tag, polar, azimuth, theta = lines[idx].split()
    if tag != "final":
        raise DomainError(f"expected the final-rotation line, got {lines[idx]!r}")
    ansatz = VariationalAnsatz(tuple(layers), CollectiveAxis.from_angles(float(polar), float(azimuth)), float(theta))
    meta = {}
    for ln in lines[idx + 1 :]:
        key, _, value = ln.partition(" ")
        meta[key] = value
    return n_atoms, ansatz, meta


# ---------------------------------------------------------------------------
# CSV outputs
# ---------------------------------------------------------------------------

def _csv_header(columns: str, params_hash: str | None) -> list[str]:
    tag = params_hash if params_hash is not None else "none"
    return [f"# dickenet {__version__} params={tag}", columns]


def trace_to_csv(trace: InterferenceTrace, params_hash: str | None = None) -> str:
    lines = _csv_header("T_seconds,I", params_hash)
    lines.extend(f"{_fmt(t)},{_fmt(v)}" for t, v in zip(trace.times, trace.signal))
    return "\n".join(lines) + "\n"


def visibility_to_csv(times, visibility, params_hash: str | None = None) -> str:
    lines = _csv_header("T_seconds,V", params_hash)
    lines.extend(f"{_fmt(t)},{_fmt(v)}" for t, v in zip(times, visibility))
    return "\n".join(lines) + "\n"


def comparison_to_csv(times, analytic, oracle, params_hash: str | None = None) -> str:
    lines = _csv_header("T_seconds,I_analytic,I_oracle,abs_diff", params_hash)
    lines.extend(
        f"{_fmt(t)},{_fmt(a)},{_fmt(o)},{_fmt(abs(a - o))}"
        for t, a, o in zip(times, analytic, oracle)
    )
    return "\n".join(lines) + "\n"


def distribution_to_csv(probs, params_hash: str | None = None, target=None) -> str:
    if target is None:
        lines = _csv_header("ell,p", params_hash)
        lines.extend(f"{ell},{_fmt(p)}" for ell, p in enumerate(probs))
    else:
        lines = _csv_header("ell,p,p_target", params_hash)
        lines.extend(f"{ell},{_fmt(p)},{_fmt(q)}" for ell, (p, q) in enumerate(zip(probs, target)))
    return "\n".join(lines) + "\n"


def cost_trace_to_csv(records, params_hash: str | None = None) -> str:
    lines = _csv_header("restart,n_evals,cost,best_so_far,aborted", params_hash)
    best = float("inf")
    for rec in records:
        if not rec.aborted and rec.cost < best:
            best = rec.cost
        lines.append(f"{rec.restart},{rec.n_evals},{_fmt(rec.cost)},{_fmt(best)},{int(rec.aborted)}")
    return "\n".join(lines) + "\n"
