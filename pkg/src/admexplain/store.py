"""Exact nearest-neighbor search over instances, with filtering and persistence.

The store is deliberately a brute-force scan: every query is exact,
deterministic (ties broken by ascending id) and therefore reproducible,
which the downstream explanation methods rely on. Writes replace the
id-indexed instance map copy-on-write under a lock, so a long explanation
computation always sees one consistent snapshot.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .core import Instance, Scalar, dump_instances_jsonl, instance_from_dict, validate_instance
from .errors import (
    CorruptFile,
    DimensionMismatch,
    DuplicateId,
    IoFailure,
    ZeroVectorUnderCosine,
)


class Metric(Enum):
    EUCLIDEAN = "Euclidean"
    COSINE = "Cosine"


@dataclass(frozen=True)
class Filter:
    """Conjunctive match over label, metadata pairs and validation flag."""

    label_equals: Scalar | None = None
    label_not_equals: Scalar | None = None
    metadata_equals: tuple[tuple[str, str], ...] = ()
    validated_only: bool = False

    def __post_init__(self) -> None:
        if self.label_equals is not None and self.label_not_equals is not None:
            raise ValueError("label_equals and label_not_equals are mutually exclusive")

    def matches(self, inst: Instance) -> bool:
        if self.label_equals is not None and inst.label != self.label_equals:
            return False
        if self.label_not_equals is not None and inst.label == self.label_not_equals:
            return False
        if self.validated_only and not inst.validated:
            return False
        for key, value in self.metadata_equals:
            if inst.metadata.get(key) != value:
                return False
        return True

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any] | None) -> "Filter | None":
        if not obj:
            return None
        meta = obj.get("metadata_equals") or {}
        pairs = tuple(meta.items()) if isinstance(meta, Mapping) else tuple(tuple(p) for p in meta)
        return cls(
            label_equals=obj.get("label_equals"),
            label_not_equals=obj.get("label_not_equals"),
            metadata_equals=pairs,
            validated_only=bool(obj.get("validated_only", False)),
        )


class Collection:
    """A named, fixed-dimension set of instances under one distance metric."""

    def __init__(self, name: str, dimension: int, metric: Metric = Metric.EUCLIDEAN):
        if dimension < 1:
            raise ValueError("dimension must be a positive integer")
        self.name = name
        self.dimension = dimension
        self.metric = metric
        self._lock = threading.RLock()
        self._instances: dict[str, Instance] = {}

    # -- writes ---------------------------------------------------------------

    def upsert(self, instance: Instance) -> int:
        """Insert or replace by id; returns the stored-instance count."""
        validate_instance(instance, self.dimension)
        self._check_vector(instance.embedding)
        with self._lock:
            updated = dict(self._instances)
            updated[instance.id] = instance
            self._instances = updated
            return len(updated)

    def insert(self, instance: Instance) -> int:
        """Strict insert: raises DuplicateId when the id already exists."""
        with self._lock:
            if instance.id in self._instances:
                raise DuplicateId(f"instance {instance.id!r} already stored in {self.name!r}")
            return self.upsert(instance)

    def upsert_many(self, instances: Iterable[Instance]) -> int:
        count = len(self._instances)
        for inst in instances:
            count = self.upsert(inst)
        return count

    def _check_vector(self, vec: tuple[float, ...] | np.ndarray) -> None:
        if self.metric is Metric.COSINE and not any(vec):
            raise ZeroVectorUnderCosine("zero vectors are undefined under the cosine metric")

    # -- reads ----------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._instances)

    def __contains__(self, instance_id: str) -> bool:
        return instance_id in self._instances

    def get(self, instance_id: str) -> Instance | None:
        return self._instances.get(instance_id)

    def instances(self) -> list[Instance]:
        """Snapshot of all stored instances, ordered by ascending id."""
        snap = self._instances
        return [snap[i] for i in sorted(snap)]

    def subset(self, ids: Iterable[str]) -> "Collection":
        """New collection restricted to ``ids`` (same name, dimension, metric)."""
        sub = Collection(self.name, self.dimension, self.metric)
        snap = self._instances
        for i in ids:
            if i in snap:
                sub.upsert(snap[i])
        return sub

    def _distances(
        self, query: np.ndarray, insts: list[Instance]
    ) -> np.ndarray:
        matrix = np.array([i.embedding for i in insts], dtype=float)
        if self.metric is Metric.EUCLIDEAN:
            return np.sqrt(((matrix - query) ** 2).sum(axis=1))
        norms = np.sqrt((matrix**2).sum(axis=1))
        qnorm = float(np.sqrt((query**2).sum()))
        return 1.0 - (matrix @ query) / (norms * qnorm)

    def _scan(self, query: Iterable[float], flt: Filter | None) -> list[tuple[str, float]]:
        q = np.asarray(tuple(query), dtype=float)
        if q.shape != (self.dimension,):
            raise DimensionMismatch(
                f"query length {q.shape[0] if q.ndim == 1 else '?'} != dimension {self.dimension}"
            )
        self._check_vector(q)
        insts = self.instances()
        if flt is not None:
            insts = [i for i in insts if flt.matches(i)]
        if not insts:
            return []
        dists = self._distances(q, insts)
        order = np.argsort(dists, kind="stable")  # instances pre-sorted by id
        return [(insts[j].id, float(dists[j])) for j in order]

    def knn_query(
        self,
        query: Iterable[float],
        k: int,
        flt: Filter | None = None,
    ) -> list[tuple[str, float]]:
        """The min(k, matches) nearest instances, sorted by (distance, id)."""
        if k < 1:
            raise ValueError("k must be >= 1")
        return self._scan(query, flt)[:k]

    def range_query(
        self,
        query: Iterable[float],
        radius: float,
        flt: Filter | None = None,
    ) -> list[tuple[str, float]]:
        """All matching instances within ``radius``, same ordering as knn_query."""
        if radius < 0:
            raise ValueError("radius must be >= 0")
        return [(i, d) for i, d in self._scan(query, flt) if d <= radius]


# ---------------------------------------------------------------------------
# Persistence: JSON header line + line-delimited instances, checksummed
# ---------------------------------------------------------------------------

FORMAT_NAME = "admexplain-collection"
FORMAT_VERSION = 1


def persist(collection: Collection, path: str | Path) -> int:
    """Write the collection to ``path``; returns the byte count written."""
    body = dump_instances_jsonl(collection.instances())
    body_bytes = body.encode("utf-8")
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "name": collection.name,
        "dimension": collection.dimension,
        "metric": collection.metric.value,
        "count": len(collection),
        "checksum": hashlib.sha256(body_bytes).hexdigest(),
    }
    payload = (json.dumps(header, sort_keys=True) + "\n").encode("utf-8") + body_bytes
    try:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return len(payload)


def load(path: str | Path) -> Collection:
    """Read a persisted collection; verifies the count and checksum."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    head, sep, body = raw.partition(b"\n")
    if not sep:
        raise CorruptFile(f"{path}: missing header line")
    try:
        header = json.loads(head.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptFile(f"{path}: unreadable header ({exc})") from exc
    if header.get("format") != FORMAT_NAME:
        raise CorruptFile(f"{path}: not a {FORMAT_NAME} file")
    if header.get("checksum") != hashlib.sha256(body).hexdigest():
        raise CorruptFile(f"{path}: checksum mismatch")
    collection = Collection(
        name=str(header["name"]),
        dimension=int(header["dimension"]),
        metric=Metric(header["metric"]),
    )
    for line in body.decode("utf-8").splitlines():
        if line.strip():
            collection.upsert(instance_from_dict(json.loads(line)))
    if len(collection) != int(header["count"]):
        raise CorruptFile(f"{path}: instance count {len(collection)} != header {header['count']}")
    return collection
