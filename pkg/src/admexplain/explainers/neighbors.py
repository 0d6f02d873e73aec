"""Neighborhood-based explainers: knn prediction, retrieval counterfactuals,
leave-one-out influence and boundary sensitivity.

Counterfactuals here are retrieved stored instances (the nearest unlike
neighbor), never synthesized points, so every answer is a real, auditable
case from the data layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from ..core import Instance, Scalar
from ..errors import EmptyCollection, MissingLabels, SingleClassCollection
from ..store import Collection, Filter


class PredictMode(Enum):
    CLASSIFY = "Classify"
    REGRESS = "Regress"


#: sentinel target for counterfactual_search: "any label other than the query's"
NOT_CURRENT = object()


@dataclass(frozen=True)
class KnnPrediction:
    prediction: Scalar
    votes: dict[Scalar, float] | None
    neighbors: list[tuple[str, float]]

    def to_dict(self) -> dict:
        return {
            "prediction": self.prediction,
            "votes": {str(k): v for k, v in self.votes.items()} if self.votes else None,
            "neighbors": [[i, d] for i, d in self.neighbors],
        }


def _require_label(inst: Instance) -> Scalar:
    if inst.label is None:
        raise MissingLabels(f"instance {inst.id!r} has no label")
    return inst.label


def _numeric_label(inst: Instance) -> float:
    label = _require_label(inst)
    if isinstance(label, bool) or not isinstance(label, (int, float)):
        raise MissingLabels(f"instance {inst.id!r}: regression needs numeric labels, got {label!r}")
    return float(label)


def majority_label(labels: list[Scalar]) -> Scalar:
    """Majority vote; ties resolved by the earliest (nearest) tied label."""
    counts: dict[Scalar, int] = {}
    for lbl in labels:
        counts[lbl] = counts.get(lbl, 0) + 1
    top = max(counts.values())
    tied = {lbl for lbl, c in counts.items() if c == top}
    for lbl in labels:  # labels arrive in distance order
        if lbl in tied:
            return lbl
    raise AssertionError("unreachable: empty label list")


def knn_predict(
    collection: Collection,
    query: Iterable[float],
    k: int,
    mode: PredictMode = PredictMode.CLASSIFY,
    flt: Filter | None = None,
) -> KnnPrediction:
    """Classify (majority vote with fractions) or regress (mean) over the k
    nearest labeled instances."""
    if len(collection) == 0:
        raise EmptyCollection(f"collection {collection.name!r} is empty")
    neighbors = collection.knn_query(query, k, flt)
    if not neighbors:
        raise EmptyCollection(f"no instances match the filter in {collection.name!r}")
    insts = [collection.get(i) for i, _ in neighbors]
    if mode is PredictMode.REGRESS:
        values = [_numeric_label(i) for i in insts]
        return KnnPrediction(sum(values) / len(values), None, neighbors)
    labels = [_require_label(i) for i in insts]
    votes = {lbl: labels.count(lbl) / len(labels) for lbl in dict.fromkeys(labels)}
    return KnnPrediction(majority_label(labels), votes, neighbors)


def counterfactual_search(
    collection: Collection,
    query: Instance,
    target: Scalar | object = NOT_CURRENT,
    immutable_features: Iterable[str] = (),
) -> tuple[str, float] | None:
    """Nearest stored instance carrying the target label whose immutable
    features exactly equal the query's. The query itself never qualifies.
    Returns None when no candidate exists (absence is a valid answer)."""
    immutables = tuple(immutable_features)

    def qualifies(inst: Instance) -> bool:
        if inst.id == query.id:
            return False
        if target is NOT_CURRENT:
            if inst.label == query.label:
                return False
        elif inst.label != target:
            return False
        return all(inst.features.get(f) == query.features.get(f) for f in immutables)

    ranked = collection.knn_query(query.embedding, len(collection) or 1)
    for iid, dist in ranked:
        if qualifies(collection.get(iid)):
            return (iid, dist)
    return None


def influential_instances(
    collection: Collection,
    query: Iterable[float],
    k: int,
    mode: PredictMode = PredictMode.CLASSIFY,
    positive_label: Scalar | None = None,
) -> list[tuple[str, float]]:
    """Leave-one-out influence of each of the k+1 nearest neighbors.

    influence(i) = prediction without i - prediction with the full set,
    where predictions are the mean numeric target of the top-k neighbors
    (for classification: the vote fraction of ``positive_label``, defaulting
    to the full-set majority class). Sorted by |influence| descending.
    """
    if len(collection) == 0:
        raise EmptyCollection(f"collection {collection.name!r} is empty")
    ring = collection.knn_query(query, k + 1)
    insts = {i: collection.get(i) for i, _ in ring}

    if mode is PredictMode.REGRESS:
        target = {i: _numeric_label(insts[i]) for i, _ in ring}
    else:
        labels_in_order = [_require_label(insts[i]) for i, _ in ring]
        positive = positive_label if positive_label is not None else majority_label(labels_in_order[:k])
        target = {i: float(insts[i].label == positive) for i, _ in ring}

    def predict(ids: list[str]) -> float:
        head = ids[:k]
        return sum(target[i] for i in head) / len(head)

    all_ids = [i for i, _ in ring]
    full_pred = predict(all_ids)
    influences = []
    for iid in all_ids:
        rest = [i for i in all_ids if i != iid]
        influence = (predict(rest) - full_pred) if rest else 0.0
        influences.append((iid, influence))
    influences.sort(key=lambda e: (-abs(e[1]), e[0]))
    return influences


def adversarial_sensitivity(
    collection: Collection,
    threshold: float,
    k: int = 1,
) -> list[tuple[str, float]]:
    """Boundary-sensitivity ratios: distance to the nearest unlike-labeled
    instance over distance to the nearest like-labeled instance (self
    excluded); instances with ratio < threshold are flagged.

    ``k`` generalizes to averaging the k nearest on each side; the default 1
    is the plain nearest-neighbor ratio. Edge rules: a point with no like
    neighbor, or coincident with an unlike point, gets ratio 0 (maximally
    sensitive); a point whose like twin coincides but whose unlike neighbors
    do not gets ratio inf (never flagged).
    Flagged results are sorted by ascending ratio, then id.
    """
    insts = collection.instances()
    if not insts:
        raise EmptyCollection(f"collection {collection.name!r} is empty")
    labels = {i.id: _require_label(i) for i in insts}
    if len(set(labels.values())) < 2:
        raise SingleClassCollection("no unlike-labeled neighbor exists for any instance")

    flagged = []
    for inst in insts:
        like = collection.knn_query(
            inst.embedding, k + 1, Filter(label_equals=labels[inst.id])
        )
        like = [d for i, d in like if i != inst.id][:k]
        unlike = collection.knn_query(
            inst.embedding, k, Filter(label_not_equals=labels[inst.id])
        )
        unlike_d = [d for _, d in unlike][:k]
        d_like = sum(like) / len(like) if like else math.inf
        d_unlike = sum(unlike_d) / len(unlike_d)
        if math.isinf(d_like):
            ratio = 0.0
        elif d_like == 0.0:
            ratio = 0.0 if d_unlike == 0.0 else math.inf
        else:
            ratio = d_unlike / d_like
        if ratio < threshold:
            flagged.append((inst.id, ratio))
    flagged.sort(key=lambda e: (e[1], e[0]))
    return flagged
