"""Explanation engine for AI-assisted decision-making.

Two layers: a vector-store data layer of labeled, validated instances, and
a catalog of example-based explanation methods, governed by a rule engine
that maps task and user profiles onto ranked method recommendations and
explicit exclusions.
"""

from .core import (
    BehaviorCategory,
    DecisionRecord,
    ExplanationBundle,
    ExplanationType,
    Expertise,
    Instance,
    MethodCatalogEntry,
    Mode,
    ModeWeightTable,
    ModelProfile,
    Perspective,
    Recommendation,
    TaskKind,
    Tier,
    UserProfile,
    default_method_catalog,
    validate_instance,
)
from .decisions import DecisionLog
from .framework import classify_task, recommend, score_modes, select_rows
from .store import Collection, Filter, Metric, load, persist

__version__ = "0.1.0"

__all__ = [
    "BehaviorCategory",
    "Collection",
    "DecisionLog",
    "DecisionRecord",
    "ExplanationBundle",
    "ExplanationType",
    "Expertise",
    "Filter",
    "Instance",
    "MethodCatalogEntry",
    "Metric",
    "Mode",
    "ModeWeightTable",
    "ModelProfile",
    "Perspective",
    "Recommendation",
    "TaskKind",
    "Tier",
    "UserProfile",
    "classify_task",
    "default_method_catalog",
    "load",
    "persist",
    "recommend",
    "score_modes",
    "select_rows",
    "validate_instance",
    "__version__",
]
