"""Rule engine: task classification, explanation-type row selection, mode
scoring and method recommendation.

The pipeline is: classify the task into a behavior category from the model
and user profiles, pick the explanation-type rows that category supports,
sum the weight-table columns over those rows to score the five modes, then
rank the implemented catalog methods by their mode's score. Methods whose
mode never engages are excluded outright; simulation-style methods are
deferred (action tasks) or excluded (experience tasks) as second-line
tools, with the rationale attached to each entry.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    BehaviorCategory,
    Expertise,
    ExplanationType,
    MethodCatalogEntry,
    Mode,
    ModeWeightTable,
    ModelProfile,
    Perspective,
    Recommendation,
    TaskKind,
    UserProfile,
    default_method_catalog,
)
from .errors import UnknownRow, UnsupportedCategory

DEFER_SIMULATION_RATIONALE = (
    "What-if simulation is a second-line tool for action-oriented tasks: "
    "offer it only after the structural and recall explanations have been "
    "exhausted."
)
EXCLUDE_SIMULATION_RATIONALE = (
    "Simulation-style outputs frame the system as producing verifiable "
    "results; for exploratory tasks with no ground truth they create false "
    "expectations of certainty and can erode trust."
)


@dataclass(frozen=True)
class RowSelection:
    """Explanation-type rows chosen for a profile, with per-row rationale."""

    rows: tuple[ExplanationType, ...]
    provenance: dict[ExplanationType, str]

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValueError("row selection must be non-empty")
        if len(set(self.rows)) != len(self.rows):
            raise ValueError("rows must be unique")


def classify_task(model_profile: ModelProfile, user_profile: UserProfile) -> BehaviorCategory:
    """Map profiles onto the dominant behavior category.

    Emulation (judgeable target) maps to Actions. A discovery-flagged task
    whose target the user *can* judge upgrades to Actions for experts: the
    emulation/discovery boundary moves with expertise. Everything else is
    Experiences.
    """
    if model_profile.task_kind is TaskKind.EMULATION:
        return BehaviorCategory.ACTIONS
    if model_profile.target_judgeable_by_user and user_profile.expertise is Expertise.EXPERT:
        return BehaviorCategory.ACTIONS
    return BehaviorCategory.EXPERIENCES


def select_rows(category: BehaviorCategory, profile: ModelProfile) -> RowSelection:
    """Explanation-type rows a category supports, tuned by profile flags."""
    if category is BehaviorCategory.ACTIONS:
        rows: list[ExplanationType] = [ExplanationType.CAUSAL_HISTORY]
        provenance = {
            ExplanationType.CAUSAL_HISTORY: "decisions attributed to broader patterns in the data",
        }
        if not profile.pragmatic_goal_focus:
            rows.append(ExplanationType.ENABLING_FACTOR)
            provenance[ExplanationType.ENABLING_FACTOR] = (
                "external conditions that made the outcome possible"
            )
        if profile.perspective is Perspective.ACTOR:
            rows.append(ExplanationType.REASON_ACTORS)
            provenance[ExplanationType.REASON_ACTORS] = (
                "the deciding agent's own rationale for the singular decision"
            )
        else:
            rows.append(ExplanationType.REASON_OBSERVERS)
            provenance[ExplanationType.REASON_OBSERVERS] = (
                "a rationale as reconstructed by an outside observer"
            )
        return RowSelection(tuple(rows), provenance)

    if category is BehaviorCategory.EXPERIENCES:
        rows = [ExplanationType.CAUSE_UNINTENTIONAL]
        provenance = {
            ExplanationType.CAUSE_UNINTENTIONAL: "unintended outcome traced to its contributing causes",
        }
        if profile.situation_cause_recall:
            rows.append(ExplanationType.REASON_ACTORS)
            provenance[ExplanationType.REASON_ACTORS] = (
                "answers anchored in source material recall the matching past case"
            )
        return RowSelection(tuple(rows), provenance)

    raise UnsupportedCategory(
        f"no selection rule for category {category.value}; only Actions and "
        f"Experiences have engine paths"
    )


def score_modes(rows: RowSelection, table: ModeWeightTable) -> dict[Mode, float]:
    """Score each mode as the sum of its weights over the selected rows."""
    for row in rows.rows:
        if row not in table.weights:
            raise UnknownRow(f"row {row!r} missing from the weight table")
    return {
        mode: sum(table.weights[row][mode] for row in rows.rows) for mode in Mode
    }


def recommend(
    model_profile: ModelProfile,
    user_profile: UserProfile,
    catalog: tuple[MethodCatalogEntry, ...] | None = None,
    table: ModeWeightTable | None = None,
) -> Recommendation:
    """Rank implemented methods for a profile; attach exclusions and deferrals.

    Ranking sorts implemented catalog entries by their mode's score
    (descending) with catalog order as the tie-break. Implemented methods
    whose mode scored 0 are excluded with a rationale; simulation-mode
    methods are deferred for action tasks and excluded for experience
    tasks. Identical inputs always produce the identical recommendation.
    """
    catalog = catalog if catalog is not None else default_method_catalog()
    table = table if table is not None else ModeWeightTable.default()

    category = classify_task(model_profile, user_profile)
    rows = select_rows(category, model_profile)
    scores = score_modes(rows, table)

    implemented = [e for e in catalog if e.tier.value == "Implemented"]
    deferred: list[tuple[str, str]] = []
    excluded: list[tuple[str, str]] = []
    rankable: list[MethodCatalogEntry] = []

    for entry in implemented:
        if entry.malle_category is Mode.SIMULATION_PROJECTION:
            if category is BehaviorCategory.ACTIONS:
                deferred.append((entry.method_name, DEFER_SIMULATION_RATIONALE))
                continue
            excluded.append((entry.method_name, EXCLUDE_SIMULATION_RATIONALE))
            continue
        if scores[entry.malle_category] == 0.0:
            excluded.append(
                (
                    entry.method_name,
                    f"no selected explanation type engages the "
                    f"{entry.malle_category.value} mode for this profile",
                )
            )
            continue
        rankable.append(entry)

    order = {e.method_name: i for i, e in enumerate(catalog)}
    rankable.sort(key=lambda e: (-scores[e.malle_category], order[e.method_name]))

    return Recommendation(
        behavior_category=category,
        mode_scores=scores,
        ranked_methods=[e.method_name for e in rankable],
        excluded=excluded,
        deferred=deferred,
    )


def method_categories(
    catalog: tuple[MethodCatalogEntry, ...] | None = None,
) -> dict[str, Mode]:
    catalog = catalog if catalog is not None else default_method_catalog()
    return {e.method_name: e.malle_category for e in catalog}


def ranked_families(
    recommendation: Recommendation,
    catalog: tuple[MethodCatalogEntry, ...] | None = None,
) -> set[Mode]:
    """Mode families present among the recommendation's ranked methods."""
    categories = method_categories(catalog)
    return {categories[name] for name in recommendation.ranked_methods}


def top_modes(recommendation: Recommendation, count: int) -> set[Mode]:
    """The ``count`` highest-scoring modes (ties favor none: pure score sort)."""
    ranked = sorted(recommendation.mode_scores.items(), key=lambda e: -e[1])
    return {mode for mode, _ in ranked[:count]}


# Reference profiles for the two shipped case harnesses. The credit console
# is an emulation task for an expert acting on their own pragmatic goal; the
# documentation assistant is a discovery task whose answers recall source
# passages (situation-cause path).

def credit_profiles() -> tuple[ModelProfile, UserProfile]:
    model = ModelProfile(
        task_kind=TaskKind.EMULATION,
        target_judgeable_by_user=True,
        pragmatic_goal_focus=True,
    )
    return model, UserProfile(expertise=Expertise.EXPERT, role="loan officer")


def docs_profiles() -> tuple[ModelProfile, UserProfile]:
    model = ModelProfile(
        task_kind=TaskKind.DISCOVERY,
        target_judgeable_by_user=False,
        situation_cause_recall=True,
    )
    return model, UserProfile(expertise=Expertise.NOVICE, role="analyst")
