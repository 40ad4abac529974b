"""Scenario assembly: validated configs -> prepared states, contexts, and schemes.

Configs select one of three state sources: a variationally compiled amplifier,
one of the closed-form circuits (the double-twist cat, the energy-tuned family,
or a sequential-excitations qubit circuit), or an explicit excitation profile.
The sequential source simulates the qubit circuit, then carries its excitation
distribution into the symmetric-subspace network state through an exact
amplifier: the interference signals depend only on the distribution and the
seed phase, which is precisely the adaptation the qubit platform needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exact_circuits, sequential, varprep
from .config import ParsedConfig
from .dicke import DickeState, EnsembleDims, SymmetricUnitary
from .errors import ConfigError, DomainError
from .gravity import GravityContext
from .network import SeedSpec, TwoNodeState, apply_local, exact_amplifier, seed_state

KNOWN_KEYS = {
    "scenario": {"name", "n_atoms", "rng_seed", "output_dir"},
    "state": {
        "kind", "target", "target_m", "target_m1", "target_m2", "layers",
        "restarts", "max_evals", "simplex_tol", "hops", "lambda", "lambda1", "lambda2",
        "cost", "variant", "alpha", "branch_k", "sequential_kind", "sequential_ell",
        "sequential_m1", "sequential_m2", "sequential_thetas", "n_qubits", "weights",
    },
    "gravity": {"omega_eg", "g", "delta_z", "phi_a", "phi_b", "c", "reference_node"},
    "seed": {"phi0", "infidelity"},
    "measurement": {"scheme", "path"},
    "time": {"start", "stop", "steps"},
    "aci": {"ell_down", "ell_up", "window"},
    "scan": {"parameter", "values"},
}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    n_atoms: int
    rng_seed: int
    output_dir: str | None
    parsed: ParsedConfig

    @property
    def dims(self) -> EnsembleDims:
        return EnsembleDims(self.n_atoms)


@dataclass(frozen=True)
class PreparedState:
    """A two-node state at T=0 plus everything the readout needs to know about it."""

    state: TwoNodeState
    phi0: float
    amplifier: SymmetricUnitary | None  # U_p, when one exists in the symmetric subspace
    branch: DickeState | None           # the excited branch |psi> = U_p|1>
    description: str


def _wrap_domain(err: DomainError, line: int | None) -> ConfigError:
    return ConfigError(str(err), line)


def load_scenario(parsed: ParsedConfig) -> ScenarioConfig:
    parsed.unknown_key_check(KNOWN_KEYS)
    name = parsed.get("scenario", "name", str)
    if any(ch in name for ch in "/\\ \t"):
        raise ConfigError(
            f"scenario name must be a plain directory name, got {name!r}",
            parsed.section_line("scenario"),
        )
    return ScenarioConfig(
        name=name,
        n_atoms=parsed.get("scenario", "n_atoms", int, minimum=1),
        rng_seed=parsed.get("scenario", "rng_seed", int, default=0),
        output_dir=parsed.get("scenario", "output_dir", str, default=None),
        parsed=parsed,
    )


def build_gravity(parsed: ParsedConfig) -> GravityContext:
    section_line = parsed.section_line("gravity")
    kwargs = dict(
        omega_eg=parsed.get("gravity", "omega_eg", float, minimum=0.0),
        reference_node=parsed.get("gravity", "reference_node", str, default="A",
                                  choices=("A", "B", "midpoint")),
    )
    if parsed.has("gravity", "g"):
        kwargs["g"] = parsed.get("gravity", "g", float)
    if parsed.has("gravity", "c"):
        kwargs["c"] = parsed.get("gravity", "c", float)
    if parsed.has("gravity", "phi_a") or parsed.has("gravity", "phi_b"):
        kwargs["phi_a"] = parsed.get("gravity", "phi_a", float)
        kwargs["phi_b"] = parsed.get("gravity", "phi_b", float)
        if parsed.has("gravity", "delta_z"):
            kwargs["delta_z"] = parsed.get("gravity", "delta_z", float)
    else:
        kwargs["delta_z"] = parsed.get("gravity", "delta_z", float)
    try:
        return GravityContext(**kwargs)
    except DomainError as err:
        raise _wrap_domain(err, section_line) from err


def build_seed(parsed: ParsedConfig) -> SeedSpec:
    try:
        return SeedSpec(
            phi0=parsed.get("seed", "phi0", float, default=0.0),
            infidelity=parsed.get("seed", "infidelity", float, default=0.0),
        )
    except DomainError as err:
        raise _wrap_domain(err, parsed.section_line("seed")) from err


def build_times(parsed: ParsedConfig) -> np.ndarray:
    start = parsed.get("time", "start", float, default=0.0)
    stop = parsed.get("time", "stop", float)
    steps = parsed.get("time", "steps", int, minimum=2)
    if stop <= start:
        raise ConfigError("time stop must exceed start", parsed.section_line("time"))
    return np.linspace(start, stop, steps)


def _variational_target(scenario: ScenarioConfig) -> tuple[DickeState, int]:
    parsed = scenario.parsed
    dims = scenario.dims
    family = parsed.get("state", "target", str, choices=("eigenstate", "clock", "coherent"))
    default_p = 5 if family == "clock" else 3
    p = parsed.get("state", "layers", int, minimum=1, default=default_p)
    line = parsed.section_line("state")
    try:
        if family == "eigenstate":
            target = varprep.mass_eigenstate(dims, parsed.get("state", "target_m", int))
        elif family == "clock":
            target = varprep.clock(
                dims,
                parsed.get("state", "target_m1", int),
                parsed.get("state", "target_m2", int),
            )
        else:
            target = varprep.coherent(dims)
    except DomainError as err:
        raise _wrap_domain(err, line) from err
    return target, p


def optimizer_config(scenario: ScenarioConfig) -> varprep.OptimizerConfig:
    parsed = scenario.parsed
    return varprep.OptimizerConfig(
        restarts=parsed.get("state", "restarts", int, minimum=1, default=20),
        max_evals=parsed.get("state", "max_evals", int, minimum=1, default=30000),
        simplex_tol=parsed.get("state", "simplex_tol", float, default=1e-10),
        seed=scenario.rng_seed,
        hops=parsed.get("state", "hops", int, minimum=0, default=4),
    )


def cost_spec(scenario: ScenarioConfig, target: DickeState) -> varprep.CostSpec:
    parsed = scenario.parsed
    kind = parsed.get("state", "cost", str, default="target_distribution",
                      choices=("target_distribution", "energy_moments"))
    if kind == "target_distribution":
        return varprep.CostSpec(kind, target=target, lam=parsed.get("state", "lambda", float, default=1.0))
    return varprep.CostSpec(
        kind,
        lam1=parsed.get("state", "lambda1", float, default=1.0),
        lam2=parsed.get("state", "lambda2", float, default=0.0),
    )


def _prepare_variational(scenario: ScenarioConfig, seed_spec: SeedSpec) -> PreparedState:
    dims = scenario.dims
    target, p = _variational_target(scenario)
    result = varprep.optimize(dims, cost_spec(scenario, target), p, optimizer_config(scenario))
    u_p = varprep.build_circuit(dims, result.ansatz)
    state = apply_local(u_p, u_p, seed_state(dims, seed_spec))
    branch = DickeState(u_p.matrix[:, 1])
    return PreparedState(state, seed_spec.phi0, u_p, branch,
                         f"variational p={p} cost={result.cost:.6f}")


def _prepare_exact(scenario: ScenarioConfig, seed_spec: SeedSpec) -> PreparedState:
    parsed = scenario.parsed
    dims = scenario.dims
    line = parsed.section_line("state")
    variant = parsed.get("state", "variant", str,
                         choices=("noon_minus_one", "psi_alpha", "sequential"))
    try:
        if variant == "noon_minus_one":
            u_p = exact_circuits.u_dt(dims)
            state = apply_local(u_p, u_p, seed_state(dims, seed_spec))
            branch = DickeState(u_p.matrix[:, 1])
            return PreparedState(state, seed_spec.phi0, u_p, branch, "exact noon_minus_one")
        if variant == "psi_alpha":
            spec = exact_circuits.AlphaSpec(
                alpha=parsed.get("state", "alpha", float),
                k=parsed.get("state", "branch_k", int, default=0),
            )
            u_p = exact_circuits.v_alpha(dims, spec) @ exact_circuits.u_dt(dims)
            state = apply_local(u_p, u_p, seed_state(dims, seed_spec))
            branch = DickeState(u_p.matrix[:, 1])
            return PreparedState(state, seed_spec.phi0, u_p, branch,
                                 f"exact psi_alpha alpha={spec.alpha:.6g} k={spec.k}")
        return _prepare_sequential(scenario, seed_spec)
    except DomainError as err:
        raise _wrap_domain(err, line) from err


def _prepare_sequential(scenario: ScenarioConfig, seed_spec: SeedSpec) -> PreparedState:
    parsed = scenario.parsed
    dims = scenario.dims
    kind = parsed.get("state", "sequential_kind", str, choices=("eigenstate", "clock", "profile"))
    n_qubits = parsed.get("state", "n_qubits", int, default=dims.n_atoms)
    if kind == "eigenstate":
        circuit = sequential.eigenstate_circuit(n_qubits, parsed.get("state", "sequential_ell", int))
    elif kind == "clock":
        circuit = sequential.clock_circuit(
            n_qubits,
            parsed.get("state", "sequential_m1", int),
            parsed.get("state", "sequential_m2", int),
        )
    else:
        circuit = sequential.profile_circuit(
            n_qubits, parsed.get_list("state", "sequential_thetas", float)
        )
    probs = sequential.sequential_populations(sequential.simulate(circuit), n_qubits)
    if n_qubits > dims.n_atoms:
        raise DomainError(f"n_qubits={n_qubits} exceeds n_atoms={dims.n_atoms}")
    amp = np.zeros(dims.dim, dtype=complex)
    amp[1 : n_qubits + 1] = np.sqrt(probs[1:])
    target = DickeState(amp)
    u_p = exact_amplifier(dims, target)
    state = apply_local(u_p, u_p, seed_state(dims, seed_spec))
    return PreparedState(state, seed_spec.phi0, u_p, target, f"sequential {kind} on {n_qubits} qubits")


def _prepare_profile(scenario: ScenarioConfig, seed_spec: SeedSpec) -> PreparedState:
    parsed = scenario.parsed
    dims = scenario.dims
    weights = np.asarray(parsed.get_list("state", "weights", float), dtype=float)
    line = parsed.sections["state"]["weights"].line
    if weights.size != dims.dim:
        raise ConfigError(
            f"profile needs {dims.dim} weights (ell = 0..N), got {weights.size}", line
        )
    if weights[0] != 0.0 or np.any(weights < 0):
        raise ConfigError("weights must be non-negative with weights[0] = 0", line)
    total = weights.sum()
    if not total > 0:
        raise ConfigError("weights must not all vanish", line)
    amp = np.sqrt(weights / total).astype(complex)
    target = DickeState(amp)
    u_p = exact_amplifier(dims, target)
    state = apply_local(u_p, u_p, seed_state(dims, seed_spec))
    return PreparedState(state, seed_spec.phi0, u_p, target, "explicit profile")


def prepare_state(scenario: ScenarioConfig) -> PreparedState:
    parsed = scenario.parsed
    seed_spec = build_seed(parsed)
    kind = parsed.get("state", "kind", str, choices=("variational", "exact", "profile"))
    if kind == "variational":
        return _prepare_variational(scenario, seed_spec)
    if kind == "exact":
        return _prepare_exact(scenario, seed_spec)
    return _prepare_profile(scenario, seed_spec)


def measurement_choice(parsed: ParsedConfig) -> tuple[str, str]:
    scheme = parsed.get("measurement", "scheme", str, default="nonlocal_parity",
                        choices=("nonlocal_parity", "local_quadrature", "position_observable"))
    path = parsed.get("measurement", "path", str, default="analytic",
                      choices=("analytic", "oracle", "compare"))
    return scheme, path
