"""High-temperature cluster-expansion estimates of quantum spin partition
functions, with an exact-diagonalization oracle for validation."""

from qce._core import (
    BetaSpec,
    ComparisonReport,
    DomainError,
    ExactResult,
    ExpansionPolynomial,
    ExpansionResult,
    NumericError,
    Polymer,
    ResourceError,
    SpinModel,
    __version__,
    choose_truncation_order,
    compare,
    emit_model,
    enumerate_connected_edge_sets,
    enumerate_polymers,
    estimate,
    exact_partition,
    expansion_polynomial,
    hermitian_eigenvalues,
    incompatible,
    load_model,
    load_model_file,
    make_polymer,
    operator_norm,
    polymer_weight,
    polymer_weight_oracle,
    preset,
    run_cli,
    truncated_expansion,
    truncated_expansion_clusterwise,
    ursell,
    ursell_exact,
    validate_beta,
)

__all__ = [
    "BetaSpec",
    "ComparisonReport",
    "DomainError",
    "ExactResult",
    "ExpansionPolynomial",
    "ExpansionResult",
    "NumericError",
    "Polymer",
    "ResourceError",
    "SpinModel",
    "__version__",
    "choose_truncation_order",
    "compare",
    "emit_model",
    "enumerate_connected_edge_sets",
    "enumerate_polymers",
    "estimate",
    "exact_partition",
    "expansion_polynomial",
    "hermitian_eigenvalues",
    "incompatible",
    "load_model",
    "load_model_file",
    "make_polymer",
    "operator_norm",
    "polymer_weight",
    "polymer_weight_oracle",
    "preset",
    "run_cli",
    "truncated_expansion",
    "truncated_expansion_clusterwise",
    "ursell",
    "ursell_exact",
    "validate_beta",
]
