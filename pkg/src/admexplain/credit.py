"""Synthetic corporate-loan harness: seeded portfolio, fixed scoring rule,
and the full explanation bundle for rejections.

The scoring model is a documented logistic formula over standardized
features, not a trained model: every constant below is frozen so ratings,
embeddings and what-if rescoring are pure functions of the raw features.
Standardization uses the generation distribution's own mean/std constants
(not sample statistics), which keeps scoring independent of the sample.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import EPOCH, ExplanationBundle, Instance, Scalar
from .errors import ApplicantApproved, EmptyQuadrant, OutOfRangeEdit, UnknownFeature
from .explainers import (
    KernelConfig,
    MetricKind,
    PredictMode,
    influential_instances,
    knn_shapley,
    permutation_importance,
    render_text,
    select_criticisms,
    select_prototypes,
)
from .framework import credit_profiles, recommend, top_modes
from .store import Collection, Filter, Metric

SECTORS = ("manufacturing", "services", "retail", "technology")
FEATURE_ORDER = ("size", "sector", "leverage", "profitability", "liquidity")

REJECTED, APPROVED = 0, 1
LABEL_NAMES = {REJECTED: "rejected", APPROVED: "approved"}


@dataclass(frozen=True)
class CreditScorer:
    """Fixed logistic rating rule: sigmoid(w . z(features) + bias).

    Size enters as standardized log-revenue; sector carries zero weight (it
    only defines quadrants), leverage weighs negative, profitability and
    liquidity positive. ``approved`` means rating >= threshold.
    """

    threshold: float = 0.5

    # standardization constants per feature (mean, std), matching the
    # generation distributions below
    Z_CONSTANTS = {
        "size": (math.log(50.0), 1.0),          # applied to log(size)
        "sector": (1.5, math.sqrt(1.25)),        # uniform code over 0..3
        "leverage": (1.0, math.sqrt(0.5)),       # gamma(k=2, theta=0.5)
        "profitability": (0.08, 0.10),           # normal
        "liquidity": (1.5, math.sqrt(3.0) * 0.5),  # gamma(k=3, theta=0.5)
    }
    WEIGHTS = {
        "size": 0.25,
        "sector": 0.0,
        "leverage": -1.3,
        "profitability": 1.1,
        "liquidity": 0.7,
    }
    BIAS = 0.35

    def standardized(self, features: Mapping[str, float]) -> tuple[float, ...]:
        z = []
        for name in FEATURE_ORDER:
            mean, std = self.Z_CONSTANTS[name]
            raw = math.log(features[name]) if name == "size" else float(features[name])
            z.append((raw - mean) / std)
        return tuple(z)

    def rating(self, features: Mapping[str, float]) -> float:
        z = self.standardized(features)
        score = self.BIAS + sum(self.WEIGHTS[n] * z[i] for i, n in enumerate(FEATURE_ORDER))
        return 1.0 / (1.0 + math.exp(-score))

    def decide(self, features: Mapping[str, float]) -> int:
        return APPROVED if self.rating(features) >= self.threshold else REJECTED

    def embedding(self, features: Mapping[str, float]) -> tuple[float, ...]:
        return self.standardized(features)


@dataclass(frozen=True)
class CreditApplicant:
    id: str
    features: dict[str, float]
    sector_name: str
    rating: float
    approved: bool


@dataclass(frozen=True)
class Quadrant:
    size_bucket: str  # "Small" | "Large" by median split
    sector: str


@dataclass(frozen=True)
class WhatIfResult:
    rating: float
    approved: bool
    delta: float

    def to_dict(self) -> dict:
        return {"rating": self.rating, "approved": self.approved, "delta": self.delta}


def generate_portfolio(n: int, seed: int, threshold: float = 0.5) -> list[CreditApplicant]:
    """Seeded deterministic portfolio of n applicants."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    scorer = CreditScorer(threshold)
    sizes = rng.lognormal(math.log(50.0), 1.0, n)
    sectors = rng.integers(0, len(SECTORS), n)
    leverage = rng.gamma(2.0, 0.5, n)
    profitability = rng.normal(0.08, 0.10, n)
    liquidity = rng.gamma(3.0, 0.5, n)
    width = max(4, len(str(n - 1)))

    applicants = []
    for i in range(n):
        features = {
            "size": float(sizes[i]),
            "sector": float(sectors[i]),
            "leverage": float(leverage[i]),
            "profitability": float(profitability[i]),
            "liquidity": float(liquidity[i]),
        }
        rating = scorer.rating(features)
        applicants.append(
            CreditApplicant(
                id=f"app-{i:0{width}d}",
                features=features,
                sector_name=SECTORS[int(sectors[i])],
                rating=rating,
                approved=rating >= threshold,
            )
        )
    return applicants


def portfolio_to_collection(
    applicants: list[CreditApplicant],
    scorer: CreditScorer,
    name: str = "credit-portfolio",
) -> Collection:
    """Embed applicants (standardized feature vectors) into a collection.

    The label and prediction both carry the model decision; the size bucket
    for quadrant grouping is a median split over this portfolio.
    """
    median_size = float(np.median([a.features["size"] for a in applicants]))
    collection = Collection(name, dimension=len(FEATURE_ORDER), metric=Metric.EUCLIDEAN)
    for a in applicants:
        decision = APPROVED if a.approved else REJECTED
        collection.upsert(
            Instance(
                id=a.id,
                embedding=scorer.embedding(a.features),
                features=dict(a.features),
                label=decision,
                prediction=decision,
                validated=True,
                metadata={
                    "sector": a.sector_name,
                    "size_bucket": size_bucket(a.features["size"], median_size),
                    "rating": format(a.rating, ".6f"),
                },
                timestamp=EPOCH,
            )
        )
    return collection


def size_bucket(size: float, median_size: float) -> str:
    return "Small" if size <= median_size else "Large"


def portfolio_median_size(collection: Collection) -> float:
    sizes = [inst.features["size"] for inst in collection.instances()]
    return float(np.median(sizes))


def quadrant_of(collection: Collection, features: Mapping[str, float], sector_name: str) -> Quadrant:
    return Quadrant(
        size_bucket=size_bucket(features["size"], portfolio_median_size(collection)),
        sector=sector_name,
    )


def quadrant_members(collection: Collection, quadrant: Quadrant) -> list[str]:
    return [
        inst.id
        for inst in collection.instances()
        if inst.metadata.get("sector") == quadrant.sector
        and inst.metadata.get("size_bucket") == quadrant.size_bucket
    ]


MIN_QUADRANT_SIZE = 10


def quadrant_importance(
    collection: Collection,
    quadrant: Quadrant,
    scorer: CreditScorer,
    repeats: int = 5,
    seed: int = 0,
    min_size: int = MIN_QUADRANT_SIZE,
) -> dict[str, tuple[float, float]]:
    """Permutation importance of the decision rule inside one quadrant."""
    ids = quadrant_members(collection, quadrant)
    if len(ids) < min_size:
        raise EmptyQuadrant(
            f"quadrant {quadrant.size_bucket}/{quadrant.sector} has {len(ids)} "
            f"member(s); needs {min_size} for a meaningful shuffle"
        )
    sub = collection.subset(ids)
    return permutation_importance(
        sub, scorer.decide, MetricKind.ACCURACY, repeats=repeats, seed=seed
    )


# what-if edits must stay inside these closed ranges
_EDIT_RANGES = {
    "size": (1e-9, math.inf),
    "sector": (0.0, float(len(SECTORS) - 1)),
    "leverage": (0.0, math.inf),
    "profitability": (-1.0, 1.0),
    "liquidity": (0.0, math.inf),
}


def whatif_rescore(
    applicant: CreditApplicant | Mapping[str, float],
    feature_edits: Mapping[str, float],
    scorer: CreditScorer | None = None,
) -> WhatIfResult:
    """Re-run the fixed scoring rule with edited features; pure by design."""
    scorer = scorer or CreditScorer()
    features = dict(applicant.features if isinstance(applicant, CreditApplicant) else applicant)
    for name, value in feature_edits.items():
        if name not in _EDIT_RANGES:
            raise UnknownFeature(f"cannot edit unknown feature {name!r}")
        lo, hi = _EDIT_RANGES[name]
        value = float(value)
        if not math.isfinite(value) or not lo <= value <= hi:
            raise OutOfRangeEdit(f"edit {name}={value!r} outside valid range [{lo}, {hi}]")
        if name == "sector" and value != int(value):
            raise OutOfRangeEdit(f"sector must be an integral code, got {value!r}")
        features[name] = value
    before = scorer.rating(
        applicant.features if isinstance(applicant, CreditApplicant) else applicant
    )
    after = scorer.rating(features)
    return WhatIfResult(
        rating=after, approved=after >= scorer.threshold, delta=after - before
    )


class CreditExplainer:
    """Builds rejection bundles; class-level work (prototypes, criticisms,
    quadrant importances, the recommendation) is computed once and shared."""

    def __init__(
        self,
        collection: Collection,
        scorer: CreditScorer,
        k: int = 5,
        prototypes_per_class: int = 3,
        criticisms_per_class: int = 2,
        min_quadrant_size: int = MIN_QUADRANT_SIZE,
        seed: int = 0,
    ):
        self.collection = collection
        self.scorer = scorer
        self.k = k
        self.seed = seed
        self.min_quadrant_size = min_quadrant_size
        self.recommendation = recommend(*credit_profiles())
        self.prototypes = select_prototypes(collection, prototypes_per_class, KernelConfig())
        self.criticisms = select_criticisms(
            collection, self.prototypes, criticisms_per_class, KernelConfig()
        )
        self._median_size = portfolio_median_size(collection)
        self._quadrant_cache: dict[Quadrant, dict[str, tuple[float, float]] | None] = {}

    def applicant_from_stored(self, instance_id: str) -> CreditApplicant:
        inst = self.collection.get(instance_id)
        if inst is None:
            raise UnknownFeature(f"no stored applicant {instance_id!r}")
        return CreditApplicant(
            id=inst.id,
            features=dict(inst.features),
            sector_name=inst.metadata.get("sector", SECTORS[int(inst.features["sector"])]),
            rating=self.scorer.rating(inst.features),
            approved=inst.label == APPROVED,
        )

    def _quadrant_importance(self, quadrant: Quadrant) -> dict[str, tuple[float, float]] | None:
        if quadrant not in self._quadrant_cache:
            try:
                self._quadrant_cache[quadrant] = quadrant_importance(
                    self.collection,
                    quadrant,
                    self.scorer,
                    seed=self.seed,
                    min_size=self.min_quadrant_size,
                )
            except EmptyQuadrant:
                self._quadrant_cache[quadrant] = None
        return self._quadrant_cache[quadrant]

    def _distance(self, a: tuple[float, ...], b: tuple[float, ...]) -> float:
        return float(np.sqrt(((np.asarray(a) - np.asarray(b)) ** 2).sum()))

    def explain(self, applicant: CreditApplicant) -> ExplanationBundle:
        """The prescribed rejection bundle; only recommended families appear.

        Simulation-style methods (retrieval counterfactuals, boundary
        sensitivity) stay out of the bundle entirely: the recommendation
        carries them in its deferred list for the what-if panel to pick up.
        """
        if applicant.approved:
            raise ApplicantApproved(
                f"applicant {applicant.id!r} was approved; explanations are "
                f"built for adverse outcomes"
            )
        query = self.scorer.embedding(applicant.features)

        approved_nn = self.collection.knn_query(query, self.k, Filter(label_equals=APPROVED))
        rejected_nn = self.collection.knn_query(query, self.k + 1, Filter(label_equals=REJECTED))
        rejected_nn = [(i, d) for i, d in rejected_nn if i != applicant.id][: self.k]

        proto_entries = [
            (pid, self._distance(query, self.collection.get(pid).embedding))
            for label in sorted(self.prototypes, key=str)
            for pid in self.prototypes[label]
        ]
        crit_entries = [
            entry
            for label in sorted(self.criticisms, key=str)
            for entry in self.criticisms[label]
        ]
        influences = influential_instances(
            self.collection, query, self.k, PredictMode.CLASSIFY, positive_label=REJECTED
        )
        attribution = knn_shapley(
            self.collection,
            applicant.features,
            k=self.k,
            mode=PredictMode.CLASSIFY,
            positive_label=REJECTED,
        )
        quadrant = Quadrant(
            size_bucket=size_bucket(applicant.features["size"], self._median_size),
            sector=applicant.sector_name,
        )
        q_importance = self._quadrant_importance(quadrant)

        methods = [
            "Prototypes",
            "Criticisms",
            "K-Nearest Neighbors (SHAP-based)",
            "Influential Instances",
        ]
        if q_importance is not None:
            methods.append("Permutation Feature Importance")
        methods.append("Natural Language Explanations (NLE)")

        bundle = ExplanationBundle(
            query_id=applicant.id,
            prototypes=proto_entries,
            criticisms=crit_entries,
            counterfactual=None,
            influences=influences,
            attributions=dict(attribution.per_feature),
            attribution_base=attribution.base_value,
            attribution_prediction=attribution.prediction,
            neighbors={"approved": approved_nn, "rejected": rejected_nn},
            quadrant_importance=q_importance,
            methods_used=methods,
        )
        labels = {
            iid: LABEL_NAMES.get(self.collection.get(iid).label, str(self.collection.get(iid).label))
            for iid in bundle.referenced_ids()
        }
        mode = next(iter(sorted(top_modes(self.recommendation, 1), key=lambda m: m.value)))
        return dataclasses.replace(bundle, rendered_text=render_text(bundle, mode, labels))


def explain_rejection(
    collection: Collection,
    applicant: CreditApplicant,
    scorer: CreditScorer | None = None,
    **kwargs,
) -> ExplanationBundle:
    """One-shot bundle for a rejected applicant (see CreditExplainer)."""
    return CreditExplainer(collection, scorer or CreditScorer(), **kwargs).explain(applicant)
