"""Quantum measure, decoherence functional, and co-event analysis."""

from .coevents import (
    CoEvent,
    CoEventSet,
    DistinguishabilityReport,
    distinguishability_report,
    enumerate_primitive_coevents,
    evaluate,
    intersect_coevent_sets,
    is_preclusive,
)
from .composition import CompositionReport, composition_anomalies, tensor_df
from .errors import (
    CoeventError,
    EmptySupportError,
    FinalSliceNotRankOneError,
    ImaginaryResidueError,
    IndexOutOfRangeError,
    InvalidPartitionError,
    LabelMismatchError,
    MissingParameterError,
    MixedInitialStateError,
    NonHermitianError,
    NotAZeroSetError,
    SpaceTooLargeError,
    UnknownScenarioError,
    ValidationFailedError,
)
from .histories import (
    DecoherenceFunctional,
    Event,
    HistorySchema,
    HistorySpace,
    Slice,
    ValidationReport,
    amplitude,
    build_df,
    class_operator,
    enumerate_histories,
    final_sectors,
    measure,
    raw_df,
    validate_df,
)
from .linalg import (
    ProjectiveDecomposition,
    QubitReduction,
    build_theta_bases,
    build_xi_basis,
    computational_basis,
    min_eigenvalue_hermitian,
    reduce_to_qubit,
    tensor,
    unitary_from_hamiltonian,
)
from .measure_analysis import (
    PartitionReport,
    ZeroSetCatalog,
    classify_zero_set,
    find_decoherent_partitions,
    find_zero_sets,
    is_decoherent_partition,
)
from .scenarios import (
    ScenarioSpec,
    build_scenario,
    emit_report,
    run_scenario,
    scenario_names,
    theta_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "CoEvent",
    "CoEventSet",
    "CoeventError",
    "CompositionReport",
    "DecoherenceFunctional",
    "DistinguishabilityReport",
    "EmptySupportError",
    "Event",
    "FinalSliceNotRankOneError",
    "HistorySchema",
    "HistorySpace",
    "ImaginaryResidueError",
    "IndexOutOfRangeError",
    "InvalidPartitionError",
    "LabelMismatchError",
    "MissingParameterError",
    "MixedInitialStateError",
    "NonHermitianError",
    "NotAZeroSetError",
    "PartitionReport",
    "ProjectiveDecomposition",
    "QubitReduction",
    "ScenarioSpec",
    "Slice",
    "SpaceTooLargeError",
    "UnknownScenarioError",
    "ValidationFailedError",
    "ValidationReport",
    "ZeroSetCatalog",
    "amplitude",
    "build_df",
    "build_scenario",
    "build_theta_bases",
    "build_xi_basis",
    "class_operator",
    "classify_zero_set",
    "composition_anomalies",
    "computational_basis",
    "distinguishability_report",
    "emit_report",
    "enumerate_histories",
    "enumerate_primitive_coevents",
    "evaluate",
    "final_sectors",
    "find_decoherent_partitions",
    "find_zero_sets",
    "intersect_coevent_sets",
    "is_decoherent_partition",
    "is_preclusive",
    "measure",
    "min_eigenvalue_hermitian",
    "raw_df",
    "reduce_to_qubit",
    "run_scenario",
    "scenario_names",
    "tensor",
    "tensor_df",
    "theta_sweep",
    "unitary_from_hamiltonian",
    "validate_df",
]
