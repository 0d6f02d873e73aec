"""Game-theoretic feature attribution over the knn prediction.

The value of a feature subset S is the knn prediction obtained when the
distance is restricted to the coordinates in S (rescaled by d/|S| so the
magnitude stays comparable across subset sizes); the empty subset is worth
the collection-mean target. Attributions are the exact Shapley values of
this game when the feature count permits enumeration, otherwise a seeded
permutation-sampling estimate. Either way the efficiency identity
sum(attributions) + base = prediction holds exactly (up to float error).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..core import Instance, Scalar
from ..errors import (
    EmptyCollection,
    MissingLabels,
    TooManyFeaturesForExact,
    UnknownFeature,
)
from ..store import Collection
from .neighbors import PredictMode, majority_label

EFFICIENCY_TOL = 1e-9


@dataclass(frozen=True)
class AttributionResult:
    """Additive per-feature contributions: base_value + sum = prediction."""

    per_feature: dict[str, float]
    base_value: float
    prediction: float

    def __post_init__(self) -> None:
        gap = abs(sum(self.per_feature.values()) + self.base_value - self.prediction)
        if gap > EFFICIENCY_TOL:
            raise ValueError(f"attribution efficiency violated by {gap:.3e}")

    def to_dict(self) -> dict:
        return {
            "per_feature": dict(self.per_feature),
            "base_value": self.base_value,
            "prediction": self.prediction,
        }


def _subset_weights(d: int) -> list[float]:
    # weight of a coalition of size s joined by one more player: s!(d-1-s)!/d!
    fact = math.factorial
    return [fact(s) * fact(d - 1 - s) / fact(d) for s in range(d)]


def knn_shapley(
    collection: Collection,
    query: Instance | Mapping[str, float],
    k: int = 5,
    mode: PredictMode = PredictMode.CLASSIFY,
    positive_label: Scalar | None = None,
    max_exact_dim: int = 12,
    method: str = "auto",
    sample_count: int = 200,
    seed: int = 0,
) -> AttributionResult:
    """Shapley attributions of the knn prediction onto the query's raw features.

    Classification predictions are the vote fraction of ``positive_label``
    (default: the majority class under the full-feature distance), so the
    attribution target is real-valued either way.
    """
    insts = collection.instances()
    if not insts:
        raise EmptyCollection(f"collection {collection.name!r} is empty")
    feats = dict(query.features) if isinstance(query, Instance) else dict(query)
    names = sorted(feats)
    if not names:
        raise UnknownFeature("query carries no features to attribute over")
    d = len(names)

    try:
        matrix = np.array([[inst.features[n] for n in names] for inst in insts], dtype=float)
    except KeyError as exc:
        raise UnknownFeature(f"stored instances lack feature {exc.args[0]!r}") from exc
    x = np.array([feats[n] for n in names], dtype=float)
    sq_diff = (matrix - x) ** 2

    if mode is PredictMode.REGRESS:
        targets = []
        for inst in insts:
            if isinstance(inst.label, bool) or not isinstance(inst.label, (int, float)):
                raise MissingLabels(f"instance {inst.id!r}: regression needs numeric labels")
            targets.append(float(inst.label))
        targets = np.array(targets)
    else:
        labels = []
        for inst in insts:
            if inst.label is None:
                raise MissingLabels(f"instance {inst.id!r} has no label")
            labels.append(inst.label)
        if positive_label is None:
            full_order = np.argsort(
                np.sqrt(sq_diff.sum(axis=1)), kind="stable"
            )[: min(k, len(insts))]
            positive_label = majority_label([labels[j] for j in full_order])
        targets = np.array([float(lbl == positive_label) for lbl in labels])

    k_eff = min(k, len(insts))
    cache: dict[int, float] = {}

    def value(mask: int) -> float:
        if mask in cache:
            return cache[mask]
        if mask == 0:
            v = float(targets.sum()) / len(targets)
        else:
            cols = [j for j in range(d) if mask >> j & 1]
            scale = d / len(cols)
            dists = np.sqrt(scale * sq_diff[:, cols].sum(axis=1))
            order = np.argsort(dists, kind="stable")[:k_eff]
            v = float(targets[order].sum()) / k_eff
        cache[mask] = v
        return v

    full_mask = (1 << d) - 1
    phi = [0.0] * d

    if method not in ("auto", "exact", "sampled"):
        raise ValueError(f"unknown attribution method {method!r}")
    exact = d <= max_exact_dim if method == "auto" else method == "exact"
    if method == "exact" and d > max_exact_dim:
        raise TooManyFeaturesForExact(
            f"{d} features exceeds max_exact_dim={max_exact_dim}; use sampled mode"
        )

    if exact:
        weights = _subset_weights(d)
        for mask in range(1 << d):
            size = mask.bit_count()
            if size == d:
                continue
            w = weights[size]
            v_s = value(mask)
            for j in range(d):
                if not mask >> j & 1:
                    phi[j] += w * (value(mask | 1 << j) - v_s)
    else:
        rng = np.random.default_rng(seed)
        for _ in range(sample_count):
            perm = rng.permutation(d)
            mask = 0
            v_prev = value(0)
            for j in perm:
                mask |= 1 << j
                v_cur = value(mask)
                phi[j] += v_cur - v_prev
                v_prev = v_cur
        phi = [p / sample_count for p in phi]

    return AttributionResult(
        per_feature={names[j]: phi[j] for j in range(d)},
        base_value=value(0),
        prediction=value(full_mask),
    )
