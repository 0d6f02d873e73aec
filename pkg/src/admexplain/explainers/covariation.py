"""Covariation explainers: error clustering, permutation importance, PDP.

Randomness is always a caller-supplied seed feeding a dedicated generator,
never ambient state, so every report is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping

import numpy as np

from ..core import Instance
from ..errors import (
    FewerPointsThanK,
    KBelowTwo,
    MissingLabels,
    UnknownFeature,
)
from ..store import Collection

KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-6


class MetricKind(Enum):
    ACCURACY = "Accuracy"
    MAE = "MAE"


@dataclass(frozen=True)
class ClusterReport:
    """k-means partition annotated with model-error covariation."""

    assignments: dict[str, int]
    centroids: list[tuple[float, ...]]
    per_cluster_error_rate: dict[int, float]
    global_error_rate: float
    lifts: dict[int, float]

    def to_dict(self) -> dict:
        return {
            "assignments": dict(self.assignments),
            "centroids": [list(c) for c in self.centroids],
            "per_cluster_error_rate": {str(k): v for k, v in self.per_cluster_error_rate.items()},
            "global_error_rate": self.global_error_rate,
            "lifts": {str(k): v for k, v in self.lifts.items()},
        }


def _is_error(inst: Instance, tolerance: float) -> bool:
    if inst.label is None or inst.prediction is None:
        raise MissingLabels(f"instance {inst.id!r} needs both label and prediction")
    lbl, pred = inst.label, inst.prediction
    numeric = (
        isinstance(lbl, (int, float))
        and isinstance(pred, (int, float))
        and not isinstance(lbl, bool)
        and not isinstance(pred, bool)
    )
    if numeric:
        return abs(float(lbl) - float(pred)) > tolerance
    return lbl != pred


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded k-means++ seeding: first center uniform, the rest D^2-weighted."""
    n = len(x)
    chosen = [int(rng.integers(n))]
    for _ in range(k - 1):
        d2 = np.min(((x[:, None, :] - x[chosen][None, :, :]) ** 2).sum(axis=2), axis=1)
        total = float(d2.sum())
        if total == 0.0:
            nxt = next(i for i in range(n) if i not in chosen)
        else:
            nxt = int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
    return x[chosen].copy()


def kmeans(
    x: np.ndarray, k: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd iterations with k-means++ seeding, capped at 300 rounds.

    Assignment ties break toward the lowest cluster index; a cluster left
    empty is re-seeded from the point farthest from its assigned centroid.
    Returns (assignments, centroids).
    """
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(x, k, rng)
    assign = np.zeros(len(x), dtype=int)
    for _ in range(KMEANS_MAX_ITER):
        d2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)  # argmin takes the first (lowest) index on ties
        reseeded: set[int] = set()
        empties = [j for j in range(k) if not (assign == j).any()]
        while empties:
            j = empties.pop(0)
            candidates = [i for i in range(len(x)) if i not in reseeded]
            if not candidates:
                break
            own = d2[np.arange(len(x)), assign]
            far = max(candidates, key=lambda i: (own[i], -i))
            assign[far] = j
            reseeded.add(far)
            empties = [jj for jj in range(k) if not (assign == jj).any()]
        new_centroids = np.array([x[assign == j].mean(axis=0) for j in range(k)])
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < KMEANS_TOL:
            break
    return assign, centroids


def cluster_covariation(
    collection: Collection,
    k_clusters: int,
    seed: int,
    regression_tolerance: float = 0.0,
) -> ClusterReport:
    """Cluster the embedding space and report where model errors concentrate.

    lift(cluster) = cluster error rate / global error rate (0 when the
    global rate is 0, i.e. a perfectly matching snapshot).
    """
    if k_clusters < 2:
        raise KBelowTwo("need at least 2 clusters")
    insts = collection.instances()
    if len(insts) < k_clusters:
        raise FewerPointsThanK(f"{len(insts)} instance(s) < k={k_clusters}")
    errors = np.array([_is_error(i, regression_tolerance) for i in insts], dtype=float)
    x = np.array([i.embedding for i in insts], dtype=float)
    assign, centroids = kmeans(x, k_clusters, seed)

    global_rate = float(errors.mean())
    per_cluster = {
        j: float(errors[assign == j].mean()) for j in range(k_clusters)
    }
    lifts = {
        j: (per_cluster[j] / global_rate if global_rate > 0 else 0.0)
        for j in range(k_clusters)
    }
    return ClusterReport(
        assignments={inst.id: int(a) for inst, a in zip(insts, assign)},
        centroids=[tuple(c) for c in centroids],
        per_cluster_error_rate=per_cluster,
        global_error_rate=global_rate,
        lifts=lifts,
    )


Model = Callable[[Mapping[str, float]], object]


def _performance(
    preds: list, labels: list, metric: MetricKind
) -> float:
    if metric is MetricKind.ACCURACY:
        return sum(p == l for p, l in zip(preds, labels)) / len(labels)
    # MAE reported on the higher-is-better scale so importances stay positive
    return -sum(abs(float(p) - float(l)) for p, l in zip(preds, labels)) / len(labels)


def permutation_importance(
    collection: Collection,
    model: Model,
    metric: MetricKind = MetricKind.ACCURACY,
    repeats: int = 5,
    seed: int = 0,
) -> dict[str, tuple[float, float]]:
    """Per-feature performance drop when that column is shuffled.

    For each feature, the column is permuted with a seeded generator,
    the model re-scored, and baseline - shuffled performance averaged over
    ``repeats`` (MAE enters negated so a useful feature always scores > 0).
    Returns feature -> (mean drop, std).
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    insts = collection.instances()
    if not insts:
        raise MissingLabels(f"collection {collection.name!r} is empty")
    labels = []
    for inst in insts:
        if inst.label is None:
            raise MissingLabels(f"instance {inst.id!r} has no label")
        labels.append(inst.label)
    rows = [dict(inst.features) for inst in insts]
    names = sorted(set().union(*rows)) if rows else []

    baseline = _performance([model(r) for r in rows], labels, metric)
    rng = np.random.default_rng(seed)
    result: dict[str, tuple[float, float]] = {}
    for name in names:
        try:
            column = [r[name] for r in rows]
        except KeyError:
            raise UnknownFeature(f"feature {name!r} missing from some instances") from None
        drops = []
        for _ in range(repeats):
            perm = rng.permutation(len(rows))
            preds = [
                model({**rows[i], name: column[perm[i]]}) for i in range(len(rows))
            ]
            drops.append(baseline - _performance(preds, labels, metric))
        mean = sum(drops) / repeats
        std = (sum((v - mean) ** 2 for v in drops) / repeats) ** 0.5
        result[name] = (mean, std)
    return result


def pdp_curve(
    collection: Collection,
    model: Model,
    feature: str,
    grid_points: int,
) -> list[tuple[float, float]]:
    """Partial dependence: mean model output with ``feature`` substituted at
    each of ``grid_points`` evenly spaced values over its observed range."""
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    insts = collection.instances()
    if not insts:
        raise MissingLabels(f"collection {collection.name!r} is empty")
    try:
        observed = [inst.features[feature] for inst in insts]
    except KeyError:
        raise UnknownFeature(f"feature {feature!r} not present on all instances") from None
    grid = np.linspace(min(observed), max(observed), grid_points)
    rows = [dict(inst.features) for inst in insts]
    curve = []
    for g in grid:
        val = float(g)
        preds = [float(model({**r, feature: val})) for r in rows]
        curve.append((val, sum(preds) / len(preds)))
    return curve
