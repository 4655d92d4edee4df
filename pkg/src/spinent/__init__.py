"""Ground-state entanglement statistics of randomly interacting qubits."""

__version__ = "0.1.0"

from .entanglement import (
    CanonicalCoefficients,
    EntanglementReport,
    bipartition_concurrence,
    concurrence_mixed,
    concurrence_pure2,
    evaluate_quantities,
    evaluate_report,
    pair_concurrence,
    state_from_canonical,
    three_tangle,
    total_concurrence,
)
from .linalg import ground_state, hermitian_eig, kron, partial_trace
from .model import InteractionKind, ModelSpec, build_hamiltonian, one_body, sample_interaction
from .montecarlo import SweepConfig, SweepResult, haar_reference, run_nearest_w, run_sweep
from .nearest_w import NearestWResult, OptimizerConfig, nearest_zero_tangle
from .rmt import GueSpec, RngStream, derive_stream, sample_gue, sample_haar_state

__all__ = [
    "CanonicalCoefficients",
    "EntanglementReport",
    "GueSpec",
    "InteractionKind",
    "ModelSpec",
    "NearestWResult",
    "OptimizerConfig",
    "RngStream",
    "SweepConfig",
    "SweepResult",
    "bipartition_concurrence",
    "build_hamiltonian",
    "concurrence_mixed",
    "concurrence_pure2",
    "derive_stream",
    "evaluate_quantities",
    "evaluate_report",
    "ground_state",
    "pair_concurrence",
    "haar_reference",
    "hermitian_eig",
    "kron",
    "nearest_zero_tangle",
    "one_body",
    "partial_trace",
    "run_nearest_w",
    "run_sweep",
    "sample_gue",
    "sample_haar_state",
    "sample_interaction",
    "state_from_canonical",
    "three_tangle",
    "total_concurrence",
]
