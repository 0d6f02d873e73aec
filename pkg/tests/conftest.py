from __future__ import annotations

import numpy as np
import pytest

from admexplain.core import Instance
from admexplain.store import Collection, Metric


def make_instance(iid, embedding, label=None, prediction=None, features=None,
                  metadata=None, validated=False):
    return Instance(
        id=iid,
        embedding=tuple(float(x) for x in embedding),
        features={k: float(v) for k, v in (features or {}).items()},
        label=label,
        prediction=prediction,
        validated=validated,
        metadata=metadata or {},
    )


@pytest.fixture
def t4():
    """The two-cluster plane fixture: A=(0,0), B=(0,1) class 0; C=(10,0),
    D=(10,1) class 1; Euclidean; predictions equal labels."""
    collection = Collection("t4", dimension=2, metric=Metric.EUCLIDEAN)
    for iid, vec, label in [
        ("A", (0.0, 0.0), 0),
        ("B", (0.0, 1.0), 0),
        ("C", (10.0, 0.0), 1),
        ("D", (10.0, 1.0), 1),
    ]:
        collection.upsert(
            make_instance(iid, vec, label=label, prediction=label,
                          features={"x": vec[0], "y": vec[1]})
        )
    return collection


def random_collection(seed, n, dim, labels=(0, 1), metric=Metric.EUCLIDEAN,
                      with_features=False, validated_fraction=0.0):
    """Seeded random collection with ids z-padded so id order is stable."""
    rng = np.random.default_rng(seed)
    collection = Collection(f"rand-{seed}", dimension=dim, metric=metric)
    width = len(str(n - 1))
    for i in range(n):
        vec = rng.normal(0.0, 1.0, dim)
        if metric is Metric.COSINE and not vec.any():
            vec[0] = 1.0
        label = labels[int(rng.integers(len(labels)))] if labels else None
        features = (
            {f"f{j}": float(vec[j]) for j in range(dim)} if with_features else {}
        )
        collection.upsert(
            make_instance(
                f"p{i:0{width}d}", vec, label=label, prediction=label,
                features=features,
                validated=bool(rng.random() < validated_fraction),
            )
        )
    return collection
