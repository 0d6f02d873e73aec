"""Explanation methods computed over a collection snapshot.

All operations are pure: identical snapshot + identical arguments +
identical seed give identical output.
"""

from .attribution import AttributionResult, knn_shapley
from .covariation import (
    ClusterReport,
    MetricKind,
    cluster_covariation,
    pdp_curve,
    permutation_importance,
)
from .neighbors import (
    NOT_CURRENT,
    KnnPrediction,
    PredictMode,
    adversarial_sensitivity,
    counterfactual_search,
    influential_instances,
    knn_predict,
)
from .prototypes import (
    KernelConfig,
    NearestPrototypeSurrogate,
    greedy_prototypes,
    prototype_surrogate,
    select_criticisms,
    select_prototypes,
    witness_scores,
)
from .reporting import render_text, training_report

__all__ = [
    "AttributionResult",
    "ClusterReport",
    "KernelConfig",
    "KnnPrediction",
    "MetricKind",
    "NearestPrototypeSurrogate",
    "NOT_CURRENT",
    "PredictMode",
    "adversarial_sensitivity",
    "cluster_covariation",
    "counterfactual_search",
    "greedy_prototypes",
    "influential_instances",
    "knn_predict",
    "knn_shapley",
    "pdp_curve",
    "permutation_importance",
    "prototype_surrogate",
    "render_text",
    "select_criticisms",
    "select_prototypes",
    "training_report",
    "witness_scores",
]
