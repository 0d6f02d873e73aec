"""Domain types shared by every module of the explanation engine.

The engine has three fixed vocabularies, kept here as enums plus two default
tables that everything else treats as replaceable data:

* four behavior categories (observable/unobservable x intentional/unintentional),
* five explanation types (the rows of the mode-association table),
* five explanation modes (its columns),

plus the method catalog: 23 named explanation methods, each assigned to one
mode and an implementation tier.

All types are immutable values after construction and safe to share across
threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Iterable, Iterator, Mapping

from .errors import (
    DimensionMismatch,
    InvalidProfile,
    MissingValidator,
    NonFiniteValue,
)

#: scalar types a label / prediction may take
Scalar = str | int | float | bool

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class TaskKind(Enum):
    EMULATION = "Emulation"
    DISCOVERY = "Discovery"


class Perspective(Enum):
    ACTOR = "Actor"
    OBSERVER = "Observer"


class Expertise(Enum):
    NOVICE = "Novice"
    EXPERT = "Expert"


class BehaviorCategory(Enum):
    """The four quadrants of observability x intentionality."""

    ACTIONS = "Actions"
    BEHAVIORS = "Behaviors"
    INTENTIONAL_THOUGHTS = "IntentionalThoughts"
    EXPERIENCES = "Experiences"


class Mode(Enum):
    """The five explanation modes (columns of the weight table)."""

    KNOWLEDGE_STRUCTURES = "KnowledgeStructures"
    SIMULATION_PROJECTION = "SimulationProjection"
    COVARIATION = "Covariation"
    DIRECT_RECALL = "DirectRecall"
    RATIONALIZATION = "Rationalization"


class ExplanationType(Enum):
    """The five explanation types (rows of the weight table)."""

    CAUSE_UNINTENTIONAL = "CauseUnintentional"
    CAUSAL_HISTORY = "CausalHistory"
    ENABLING_FACTOR = "EnablingFactor"
    REASON_ACTORS = "ReasonActors"
    REASON_OBSERVERS = "ReasonObservers"


class Tier(Enum):
    IMPLEMENTED = "Implemented"
    PLANNED = "Planned"
    OUT_OF_SCOPE = "OutOfScope"


MODES: tuple[Mode, ...] = tuple(Mode)
EXPLANATION_TYPES: tuple[ExplanationType, ...] = tuple(ExplanationType)


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """One stored observation: embedding, raw features, label, prediction.

    ``embedding`` length must equal the owning collection's dimension;
    ``features`` maps names to finite reals (domain units per feature).
    """

    id: str
    embedding: tuple[float, ...]
    features: dict[str, float] = field(default_factory=dict)
    label: Scalar | None = None
    prediction: Scalar | None = None
    validated: bool = False
    metadata: dict[str, str] = field(default_factory=dict)
    timestamp: datetime = EPOCH


def validate_instance(candidate: Instance, dimension: int) -> Instance:
    """Return ``candidate`` unchanged iff all invariants hold.

    Raises DimensionMismatch when the embedding length differs from the
    collection dimension, NonFiniteValue when any embedding coordinate or
    feature value is NaN/inf. Id uniqueness is checked at insertion time.
    """
    if not candidate.id:
        raise NonFiniteValue("instance id must be a non-empty string")
    if len(candidate.embedding) != dimension:
        raise DimensionMismatch(
            f"instance {candidate.id!r}: embedding length "
            f"{len(candidate.embedding)} != collection dimension {dimension}"
        )
    for x in candidate.embedding:
        if not math.isfinite(x):
            raise NonFiniteValue(f"instance {candidate.id!r}: non-finite embedding value {x!r}")
    for name, value in candidate.features.items():
        if not math.isfinite(value):
            raise NonFiniteValue(f"instance {candidate.id!r}: feature {name!r} is {value!r}")
    return candidate


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    return {
        "id": inst.id,
        "embedding": list(inst.embedding),
        "features": dict(inst.features),
        "label": inst.label,
        "prediction": inst.prediction,
        "validated": inst.validated,
        "metadata": dict(inst.metadata),
        "timestamp": inst.timestamp.isoformat(),
    }


def instance_from_dict(obj: Mapping[str, Any]) -> Instance:
    ts = obj.get("timestamp")
    if isinstance(ts, str):
        timestamp = datetime.fromisoformat(ts)
    elif ts is None:
        timestamp = EPOCH
    else:
        timestamp = ts
    return Instance(
        id=str(obj["id"]),
        embedding=tuple(float(x) for x in obj["embedding"]),
        features={str(k): float(v) for k, v in (obj.get("features") or {}).items()},
        label=obj.get("label"),
        prediction=obj.get("prediction"),
        validated=bool(obj.get("validated", False)),
        metadata={str(k): str(v) for k, v in (obj.get("metadata") or {}).items()},
        timestamp=timestamp,
    )


def parse_instances_jsonl(text: str) -> Iterator[Instance]:
    """Parse the line-delimited JSON ingestion format, one object per line."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {lineno}: invalid JSON ({exc})") from exc
        yield instance_from_dict(obj)


def dump_instances_jsonl(instances: Iterable[Instance]) -> str:
    return "".join(
        json.dumps(instance_to_dict(i), sort_keys=True, ensure_ascii=False) + "\n"
        for i in instances
    )


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelProfile:
    """Traits of the modeled task that drive explanation-mode selection.

    ``pragmatic_goal_focus`` drops the enabling-factor row for action tasks;
    ``situation_cause_recall`` adds the reason/actors row for experience
    tasks whose answers are anchored in source material.
    """

    task_kind: TaskKind
    target_judgeable_by_user: bool
    perspective: Perspective = Perspective.ACTOR
    pragmatic_goal_focus: bool = False
    situation_cause_recall: bool = False

    def __post_init__(self) -> None:
        # an emulation task presumes the user can judge the target
        if self.task_kind is TaskKind.EMULATION and not self.target_judgeable_by_user:
            raise InvalidProfile("Emulation tasks require a judgeable target")


@dataclass(frozen=True)
class UserProfile:
    expertise: Expertise
    role: str = ""


def model_profile_from_dict(obj: Mapping[str, Any]) -> ModelProfile:
    return ModelProfile(
        task_kind=TaskKind(obj["task_kind"]),
        target_judgeable_by_user=bool(obj["target_judgeable_by_user"]),
        perspective=Perspective(obj.get("perspective", "Actor")),
        pragmatic_goal_focus=bool(obj.get("pragmatic_goal_focus", False)),
        situation_cause_recall=bool(obj.get("situation_cause_recall", False)),
    )


def user_profile_from_dict(obj: Mapping[str, Any]) -> UserProfile:
    return UserProfile(expertise=Expertise(obj["expertise"]), role=str(obj.get("role", "")))


def model_profile_to_dict(p: ModelProfile) -> dict[str, Any]:
    return {
        "task_kind": p.task_kind.value,
        "target_judgeable_by_user": p.target_judgeable_by_user,
        "perspective": p.perspective.value,
        "pragmatic_goal_focus": p.pragmatic_goal_focus,
        "situation_cause_recall": p.situation_cause_recall,
    }


def user_profile_to_dict(p: UserProfile) -> dict[str, Any]:
    return {"expertise": p.expertise.value, "role": p.role}


# ---------------------------------------------------------------------------
# Mode weight table
# ---------------------------------------------------------------------------

#: ordinal marks and their numeric encoding; the encoding preserves the
#: strict ordering xx > x > (x) > blank, which is all the source taxonomy
#: asserts about the marks.
MARK_TO_WEIGHT: dict[str, float] = {"xx": 2.0, "x": 1.0, "(x)": 0.5, "": 0.0}
WEIGHT_TO_MARK: dict[float, str] = {w: m for m, w in MARK_TO_WEIGHT.items()}

_DEFAULT_MARKS: dict[ExplanationType, tuple[str, str, str, str, str]] = {
    ExplanationType.CAUSE_UNINTENTIONAL: ("x", "(x)", "(x)", "", ""),
    ExplanationType.CAUSAL_HISTORY: ("xx", "x", "x", "", ""),
    ExplanationType.ENABLING_FACTOR: ("xx", "", "x", "", ""),
    ExplanationType.REASON_ACTORS: ("(x)", "", "", "xx", "x"),
    ExplanationType.REASON_OBSERVERS: ("xx", "xx", "(x)", "", ""),
}


@dataclass(frozen=True)
class ModeWeightTable:
    """Numeric association strengths between explanation types and modes.

    Rows are the five explanation types, columns the five modes. The default
    table is the exact numeric encoding of the published association marks;
    callers may substitute their own calibrated weights (all must be >= 0).
    """

    weights: dict[ExplanationType, dict[Mode, float]]

    def __post_init__(self) -> None:
        for row in EXPLANATION_TYPES:
            cols = self.weights.get(row)
            if cols is None or set(cols) != set(MODES):
                raise ValueError(f"weight table must cover all modes for row {row.value}")
            for mode, w in cols.items():
                if w < 0:
                    raise ValueError(f"negative weight at ({row.value}, {mode.value})")

    @classmethod
    def default(cls) -> "ModeWeightTable":
        return cls(
            weights={
                row: {mode: MARK_TO_WEIGHT[mark] for mode, mark in zip(MODES, marks)}
                for row, marks in _DEFAULT_MARKS.items()
            }
        )

    def weight(self, row: ExplanationType, mode: Mode) -> float:
        return self.weights[row][mode]

    def to_marks(self) -> dict[ExplanationType, dict[Mode, str]]:
        """Decode weights back to ordinal marks (inverse of the default encoding).

        Only defined for mark-encoded tables (weights in {0, 0.5, 1, 2}).
        """
        marks: dict[ExplanationType, dict[Mode, str]] = {}
        for row in EXPLANATION_TYPES:
            marks[row] = {}
            for mode in MODES:
                weight = self.weights[row][mode]
                if weight not in WEIGHT_TO_MARK:
                    raise ValueError(
                        f"weight {weight!r} at ({row.value}, {mode.value}) has no mark encoding"
                    )
                marks[row][mode] = WEIGHT_TO_MARK[weight]
        return marks

    def to_dict(self) -> dict[str, dict[str, float]]:
        return {
            row.value: {mode.value: self.weights[row][mode] for mode in MODES}
            for row in EXPLANATION_TYPES
        }

    @classmethod
    def from_dict(cls, obj: Mapping[str, Mapping[str, float]]) -> "ModeWeightTable":
        return cls(
            weights={
                ExplanationType(row): {Mode(mode): float(w) for mode, w in cols.items()}
                for row, cols in obj.items()
            }
        )


# ---------------------------------------------------------------------------
# Method catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MethodCatalogEntry:
    method_name: str
    malle_category: Mode
    tier: Tier


# Catalog order doubles as the deterministic tie-break among methods that
# share a category, so the tuple order below is load-bearing.
_DEFAULT_CATALOG: tuple[tuple[str, Mode, Tier], ...] = (
    ("Counterfactual Explanations", Mode.SIMULATION_PROJECTION, Tier.IMPLEMENTED),
    ("Adversarial Examples", Mode.SIMULATION_PROJECTION, Tier.IMPLEMENTED),
    ("Prototypes", Mode.KNOWLEDGE_STRUCTURES, Tier.IMPLEMENTED),
    ("Criticisms", Mode.KNOWLEDGE_STRUCTURES, Tier.IMPLEMENTED),
    ("Influential Instances", Mode.DIRECT_RECALL, Tier.IMPLEMENTED),
    ("K-Nearest Neighbors (SHAP-based)", Mode.KNOWLEDGE_STRUCTURES, Tier.IMPLEMENTED),
    ("Partial Dependence Plot (PDP)", Mode.COVARIATION, Tier.IMPLEMENTED),
    ("Accumulated Local Effects (ALE)", Mode.COVARIATION, Tier.OUT_OF_SCOPE),
    ("Feature Interaction (H-statistic)", Mode.COVARIATION, Tier.OUT_OF_SCOPE),
    ("Functional Decomposition", Mode.KNOWLEDGE_STRUCTURES, Tier.OUT_OF_SCOPE),
    ("Permutation Feature Importance", Mode.COVARIATION, Tier.IMPLEMENTED),
    ("Global Surrogate Models", Mode.KNOWLEDGE_STRUCTURES, Tier.IMPLEMENTED),
    ("Model Training Report", Mode.RATIONALIZATION, Tier.IMPLEMENTED),
    ("Cluster Analysis for Covariation", Mode.COVARIATION, Tier.IMPLEMENTED),
    ("Case-Based Reasoning (CBR)", Mode.DIRECT_RECALL, Tier.OUT_OF_SCOPE),
    ("Exemplar-Based Explanations", Mode.DIRECT_RECALL, Tier.PLANNED),
    ("Memory-Augmented Neural Networks (MANNs)", Mode.DIRECT_RECALL, Tier.OUT_OF_SCOPE),
    ("Nearest Prototype Recall", Mode.DIRECT_RECALL, Tier.PLANNED),
    ("Historical Decision Logs", Mode.DIRECT_RECALL, Tier.IMPLEMENTED),
    ("Natural Language Explanations (NLE)", Mode.RATIONALIZATION, Tier.IMPLEMENTED),
    ("Decision Rule Extraction (RuleFit)", Mode.RATIONALIZATION, Tier.OUT_OF_SCOPE),
    ("Narrative-Based Explanations", Mode.RATIONALIZATION, Tier.OUT_OF_SCOPE),
    ("Post-Hoc Justifications (Bias Alignment)", Mode.RATIONALIZATION, Tier.OUT_OF_SCOPE),
)


def default_method_catalog() -> tuple[MethodCatalogEntry, ...]:
    """The built-in catalog: 23 methods, each with its mode and tier."""
    return tuple(MethodCatalogEntry(n, c, t) for n, c, t in _DEFAULT_CATALOG)


def catalog_to_list(catalog: Iterable[MethodCatalogEntry]) -> list[dict[str, str]]:
    return [
        {"method_name": e.method_name, "malle_category": e.malle_category.value, "tier": e.tier.value}
        for e in catalog
    ]


def catalog_from_list(objs: Iterable[Mapping[str, str]]) -> tuple[MethodCatalogEntry, ...]:
    return tuple(
        MethodCatalogEntry(str(o["method_name"]), Mode(o["malle_category"]), Tier(o["tier"]))
        for o in objs
    )


# ---------------------------------------------------------------------------
# Recommendation / bundle / decision record
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Recommendation:
    """Ranked modes and methods for one profile, plus exclusions with reasons."""

    behavior_category: BehaviorCategory
    mode_scores: dict[Mode, float]
    ranked_methods: list[str]
    excluded: list[tuple[str, str]]
    deferred: list[tuple[str, str]]

    def __post_init__(self) -> None:
        if set(self.mode_scores) != set(MODES):
            raise ValueError("mode_scores must cover exactly the five modes")
        excluded_names = {name for name, _ in self.excluded}
        if excluded_names & set(self.ranked_methods):
            raise ValueError("ranked_methods and excluded must be disjoint")

    def to_dict(self) -> dict[str, Any]:
        return {
            "behavior_category": self.behavior_category.value,
            "mode_scores": {m.value: s for m, s in self.mode_scores.items()},
            "ranked_methods": list(self.ranked_methods),
            "excluded": [{"method": n, "rationale": r} for n, r in self.excluded],
            "deferred": [{"method": n, "rationale": r} for n, r in self.deferred],
        }


@dataclass(frozen=True)
class ExplanationBundle:
    """Composite answer for one query instance.

    ``prototypes`` carry query distances, ``criticisms`` witness scores,
    ``influences`` leave-one-out deltas. ``neighbors`` (per label) and
    ``quadrant_importance`` are populated by case harnesses that use them;
    ``methods_used`` records the catalog names of the methods that produced
    the bundle's content.
    """

    query_id: str
    prototypes: list[tuple[str, float]] = field(default_factory=list)
    criticisms: list[tuple[str, float]] = field(default_factory=list)
    counterfactual: tuple[str, float] | None = None
    influences: list[tuple[str, float]] = field(default_factory=list)
    attributions: dict[str, float] = field(default_factory=dict)
    attribution_base: float | None = None
    attribution_prediction: float | None = None
    rendered_text: str = ""
    neighbors: dict[str, list[tuple[str, float]]] = field(default_factory=dict)
    quadrant_importance: dict[str, tuple[float, float]] | None = None
    methods_used: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "query_id": self.query_id,
            "prototypes": [[i, d] for i, d in self.prototypes],
            "criticisms": [[i, s] for i, s in self.criticisms],
            "counterfactual": list(self.counterfactual) if self.counterfactual else None,
            "influences": [[i, v] for i, v in self.influences],
            "attributions": dict(self.attributions),
            "attribution_base": self.attribution_base,
            "attribution_prediction": self.attribution_prediction,
            "rendered_text": self.rendered_text,
            "neighbors": {k: [[i, d] for i, d in v] for k, v in self.neighbors.items()},
            "quadrant_importance": (
                {k: [m, s] for k, (m, s) in self.quadrant_importance.items()}
                if self.quadrant_importance is not None
                else None
            ),
            "methods_used": list(self.methods_used),
        }

    def referenced_ids(self) -> set[str]:
        ids = {i for i, _ in self.prototypes}
        ids |= {i for i, _ in self.criticisms}
        ids |= {i for i, _ in self.influences}
        if self.counterfactual is not None:
            ids.add(self.counterfactual[0])
        for entries in self.neighbors.values():
            ids |= {i for i, _ in entries}
        return ids


@dataclass(frozen=True)
class DecisionRecord:
    """A logged human decision/override or validated answer."""

    id: str
    query_embedding: tuple[float, ...]
    decision: str
    justification: str
    validator: str
    validated: bool
    timestamp: datetime = EPOCH

    def __post_init__(self) -> None:
        if self.validated and not self.validator.strip():
            raise MissingValidator(f"record {self.id!r}: validated records need a validator")


def decision_record_to_dict(rec: DecisionRecord) -> dict[str, Any]:
    return {
        "id": rec.id,
        "query_embedding": list(rec.query_embedding),
        "decision": rec.decision,
        "justification": rec.justification,
        "validator": rec.validator,
        "validated": rec.validated,
        "timestamp": rec.timestamp.isoformat(),
    }


def decision_record_from_dict(obj: Mapping[str, Any]) -> DecisionRecord:
    ts = obj.get("timestamp")
    timestamp = datetime.fromisoformat(ts) if isinstance(ts, str) else (ts or EPOCH)
    return DecisionRecord(
        id=str(obj["id"]),
        query_embedding=tuple(float(x) for x in obj["query_embedding"]),
        decision=str(obj.get("decision", "")),
        justification=str(obj.get("justification", "")),
        validator=str(obj.get("validator", "")),
        validated=bool(obj.get("validated", False)),
        timestamp=timestamp,
    )
