"""Qubit state discrimination and no-signaling laboratory."""

from .bloch_core import (
    BlochVector,
    CanonicalGeometry,
    DensityOperator,
    PureQubit,
    bloch_from_pure,
    canonical_geometry,
    density_from_mixture,
    overlap,
    pure_from_amplitudes,
    pure_from_bloch,
)
from .discrimination import (
    ProjectiveDetector,
    SuperQuantumDetector,
    TwoOutcomePovm,
    behavioral_response,
    detector_error,
    helstrom_bound,
    optimal_detector,
    oracle_min_error,
    pe_min,
    povm_outcome_probability,
)
from .signaling import (
    NoSignalReport,
    ProtocolConfig,
    SessionRecord,
    alice_basis_for_bit,
    analytic_marginals,
    bob_decide,
    estimate_bob_error,
    no_signal_test,
    run_round,
    run_session,
)
from .steering import (
    BipartiteState,
    Decomposition,
    OrthonormalBasis,
    build_psi,
    decomposition_residual,
    primed_basis,
    reduced_state_bob,
    steer,
)

__version__ = "0.1.0"
