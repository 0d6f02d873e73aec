"""Prototype and criticism selection via kernel two-sample discrepancy.

Prototypes greedily minimize the squared maximum-mean-discrepancy between a
class sample and the selected set; criticisms are the points with the
largest absolute witness value (mean kernel similarity to the data minus
mean similarity to the prototypes). The kernel is RBF with a median
pairwise-distance bandwidth unless the caller fixes one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..core import Instance, Scalar
from ..errors import (
    ClassTooSmall,
    CountExceedsRemaining,
    MissingLabels,
    NoPrototypes,
)
from ..store import Collection, Metric


@dataclass(frozen=True)
class KernelConfig:
    """RBF kernel; bandwidth None means the median pairwise-distance heuristic."""

    kind: str = "RBF"
    bandwidth: float | None = None

    def __post_init__(self) -> None:
        if self.kind != "RBF":
            raise ValueError(f"unsupported kernel kind {self.kind!r}")
        if self.bandwidth is not None and self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")

    def resolve(self, vectors: np.ndarray) -> float:
        if self.bandwidth is not None:
            return self.bandwidth
        return median_pairwise_distance(vectors)


def median_pairwise_distance(vectors: np.ndarray) -> float:
    """Median of all pairwise Euclidean distances; 1.0 when degenerate."""
    n = len(vectors)
    if n < 2:
        return 1.0
    dists = []
    for i in range(n):
        diff = vectors[i + 1 :] - vectors[i]
        dists.extend(np.sqrt((diff**2).sum(axis=1)).tolist())
    med = float(np.median(dists))
    return med if med > 0 else 1.0


def rbf_kernel(a: np.ndarray, b: np.ndarray, sigma: float) -> np.ndarray:
    sq = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-sq / (2.0 * sigma * sigma))


def squared_mmd(kernel: np.ndarray, chosen: Sequence[int]) -> float:
    """MMD^2 between the full sample (kernel rows) and the chosen indices."""
    n = kernel.shape[0]
    m = len(chosen)
    t_data = float(kernel.sum()) / (n * n)
    t_cross = float(kernel[:, chosen].sum()) / (n * m)
    t_chosen = float(kernel[np.ix_(chosen, chosen)].sum()) / (m * m)
    return t_data - 2.0 * t_cross + t_chosen


def greedy_prototypes(
    points: Sequence[tuple[str, Sequence[float]]],
    m: int,
    sigma: float,
) -> tuple[list[str], list[float]]:
    """Greedy MMD^2 minimization over (id, vector) points sorted by id.

    At each step the candidate whose addition yields the lowest MMD^2 wins;
    ties break toward the lowest id (candidates are scanned in id order with
    a strictly-less comparison). Returns the chosen ids in selection order
    and the MMD^2 value after each step.
    """
    ids = [pid for pid, _ in points]
    matrix = np.array([vec for _, vec in points], dtype=float)
    kernel = rbf_kernel(matrix, matrix, sigma)
    chosen: list[int] = []
    trace: list[float] = []
    for _ in range(m):
        best_score = None
        best_idx = None
        for idx in range(len(ids)):
            if idx in chosen:
                continue
            score = squared_mmd(kernel, chosen + [idx])
            if best_score is None or score < best_score:
                best_score, best_idx = score, idx
        chosen.append(best_idx)
        trace.append(best_score)
    return [ids[i] for i in chosen], trace


def witness_scores(
    points: Sequence[tuple[str, Sequence[float]]],
    prototype_ids: Sequence[str],
    sigma: float,
) -> dict[str, float]:
    """|mean kernel similarity to the data - mean similarity to prototypes|."""
    ids = [pid for pid, _ in points]
    matrix = np.array([vec for _, vec in points], dtype=float)
    kernel = rbf_kernel(matrix, matrix, sigma)
    proto_idx = [ids.index(p) for p in prototype_ids]
    to_data = kernel.mean(axis=1)
    to_protos = kernel[:, proto_idx].mean(axis=1)
    return {pid: float(abs(to_data[i] - to_protos[i])) for i, pid in enumerate(ids)}


def _class_samples(collection: Collection) -> dict[Scalar, list[Instance]]:
    groups: dict[Scalar, list[Instance]] = {}
    for inst in collection.instances():  # id order
        if inst.label is None:
            continue
        groups.setdefault(inst.label, []).append(inst)
    if not groups:
        raise MissingLabels(f"collection {collection.name!r} has no labeled instances")
    return groups


def select_prototypes(
    collection: Collection,
    per_class_count: int,
    kernel: KernelConfig | None = None,
) -> dict[Scalar, list[str]]:
    """Per-class prototype ids, greedily chosen to minimize class MMD^2."""
    if per_class_count < 1:
        raise ValueError("per_class_count must be >= 1")
    kernel = kernel or KernelConfig()
    result: dict[Scalar, list[str]] = {}
    for label, members in sorted(_class_samples(collection).items(), key=lambda g: str(g[0])):
        if len(members) < per_class_count:
            raise ClassTooSmall(
                f"class {label!r} has {len(members)} member(s), needs {per_class_count}"
            )
        points = [(i.id, i.embedding) for i in members]
        sigma = kernel.resolve(np.array([i.embedding for i in members], dtype=float))
        result[label], _ = greedy_prototypes(points, per_class_count, sigma)
    return result


def select_criticisms(
    collection: Collection,
    prototypes: Mapping[Scalar, Sequence[str]],
    count: int,
    kernel: KernelConfig | None = None,
) -> dict[Scalar, list[tuple[str, float]]]:
    """Per-class criticisms: the ``count`` non-prototype members with the
    largest witness magnitude, scores included. Ties break by ascending id."""
    if count < 0:
        raise ValueError("count must be >= 0")
    kernel = kernel or KernelConfig()
    result: dict[Scalar, list[tuple[str, float]]] = {}
    for label, members in sorted(_class_samples(collection).items(), key=lambda g: str(g[0])):
        proto_ids = list(prototypes.get(label, ()))
        if not proto_ids:
            continue
        candidates = [i for i in members if i.id not in proto_ids]
        if count > len(candidates):
            raise CountExceedsRemaining(
                f"class {label!r}: requested {count} criticisms, "
                f"only {len(candidates)} non-prototype member(s) remain"
            )
        if count == 0:
            result[label] = []
            continue
        points = [(i.id, i.embedding) for i in members]
        sigma = kernel.resolve(np.array([i.embedding for i in members], dtype=float))
        scores = witness_scores(points, proto_ids, sigma)
        ranked = sorted(
            ((i.id, scores[i.id]) for i in candidates),
            key=lambda e: (-e[1], e[0]),
        )
        result[label] = ranked[:count]
    return result


class NearestPrototypeSurrogate:
    """Classifies by the label of the nearest prototype (ties by prototype id)."""

    def __init__(self, labeled_prototypes: Sequence[tuple[str, Scalar, Sequence[float]]], metric: Metric):
        if not labeled_prototypes:
            raise NoPrototypes("surrogate needs at least one prototype")
        self.entries = sorted(labeled_prototypes, key=lambda e: e[0])
        self.metric = metric

    def predict(self, vector: Sequence[float]) -> Scalar:
        q = np.asarray(vector, dtype=float)
        best = None
        for pid, label, vec in self.entries:
            v = np.asarray(vec, dtype=float)
            if self.metric is Metric.COSINE:
                d = 1.0 - float(v @ q) / (float(np.sqrt((v**2).sum())) * float(np.sqrt((q**2).sum())))
            else:
                d = float(np.sqrt(((v - q) ** 2).sum()))
            if best is None or d < best[0]:
                best = (d, pid, label)
        return best[2]


def prototype_surrogate(
    collection: Collection,
    prototypes: Mapping[Scalar, Sequence[str]],
) -> tuple[NearestPrototypeSurrogate, float]:
    """Nearest-prototype surrogate plus its fidelity: the fraction of stored
    instances where the surrogate agrees with the stored prediction (falling
    back to the label when no prediction is stored)."""
    labeled = [
        (pid, label, collection.get(pid).embedding)
        for label, ids in sorted(prototypes.items(), key=lambda g: str(g[0]))
        for pid in ids
        if collection.get(pid) is not None
    ]
    surrogate = NearestPrototypeSurrogate(labeled, collection.metric)
    agree = 0
    scored = 0
    for inst in collection.instances():
        reference = inst.prediction if inst.prediction is not None else inst.label
        if reference is None:
            continue
        scored += 1
        if surrogate.predict(inst.embedding) == reference:
            agree += 1
    fidelity = agree / scored if scored else 0.0
    return surrogate, fidelity
