"""Deterministic simulator of entangled atomic-ensemble networks in the Dicke subspace.

Two nodes of N collectively addressed two-level atoms share a Bell-type seed;
local twisting circuits amplify it into non-local mass superpositions whose
gravitational-redshift phases are read out by a non-local Ramsey protocol.
Every analytic signal formula is paired with an independent brute-force
oracle (Fock-space beam splitter / homodyne, qubit statevector, closed forms).
"""

__version__ = "0.1.0"

from .dicke import (
    CollectiveAxis,
    DickeState,
    EnsembleDims,
    EnergyMoments,
    SymmetricUnitary,
    apply,
    coherent_state,
    collective_spin,
    dicke_basis_state,
    energy_moments,
    fidelity,
    husimi_q,
    mass_distribution,
    oat,
    rotation,
)
from .errors import (
    ConfigError,
    DickenetError,
    DomainError,
    NumericFailure,
    UnsupportedConfigurationError,
)
from .exact_circuits import (
    AlphaSpec,
    excited_branch,
    noon_minus_one,
    psi_alpha,
    qfi_differential_phase,
    u_dt,
    u_dt_closed_form,
    u_dt_positive_angle,
    v_alpha,
)
from .gravity import (
    AciParams,
    GravityContext,
    InterferenceTrace,
    aci_interference,
    aci_visibility,
    decoherence_time,
    gaussian_envelope,
    redshift_phase,
)
from .measurement import (
    MeasurementScheme,
    TwoModeFockState,
    dominant_frequency,
    embed_two_node,
    envelope_fit,
    oracle_beam_splitter_parity,
    oracle_quadrature_product,
    position_observable_expectation,
    run_ramsey,
    signal_local_analytic,
    signal_nonlocal_analytic,
)
from .network import (
    ExcitationProfile,
    SeedSpec,
    TwoNodeState,
    apply_local,
    evolve_gravity,
    exact_amplifier,
    extract_excitation_profile,
    seed_state,
)
from .sequential import (
    QubitCircuit,
    QubitGate,
    clock_circuit,
    eigenstate_circuit,
    profile_circuit,
    profile_probabilities,
    sequential_circuit,
    sequential_populations,
    simulate,
)
from .varprep import (
    CostSpec,
    OptimizeResult,
    OptimizerConfig,
    VariationalAnsatz,
    build_circuit,
    clock,
    coherent,
    cost_energy,
    cost_target,
    mass_eigenstate,
    optimize,
)
