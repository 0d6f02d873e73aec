"""Snapshot semantics under concurrent readers and writers."""

import threading

from fastapi.testclient import TestClient

from admexplain.service import ServiceConfig, create_app
from admexplain.store import Collection

from .conftest import make_instance


def test_readers_see_complete_snapshots_during_writes():
    c = Collection("live", 2)
    for i in range(50):
        c.upsert(make_instance(f"p{i:03d}", (float(i), 0.0), label=i % 2))

    stop = threading.Event()
    problems: list[str] = []

    def reader():
        while not stop.is_set():
            hits = c.knn_query((0.0, 0.0), 10)
            # ordering invariant must hold on whatever snapshot was observed
            distances = [d for _, d in hits]
            if distances != sorted(distances):
                problems.append("unsorted result")
            if len(hits) != len({i for i, _ in hits}):
                problems.append("duplicate ids in one snapshot")

    readers = [threading.Thread(target=reader) for _ in range(4)]
    for t in readers:
        t.start()
    for i in range(50, 250):
        c.upsert(make_instance(f"p{i:03d}", (float(i), 0.0), label=i % 2))
    stop.set()
    for t in readers:
        t.join()
    assert problems == []
    assert len(c) == 250


def test_concurrent_requests_on_static_snapshot_are_identical():
    app = create_app(ServiceConfig())
    client = TestClient(app)
    client.post("/collections", json={"name": "s", "dimension": 2})
    lines = "".join(
        '{"id": "p%02d", "embedding": [%d, 0], "label": %d}\n' % (i, i, i % 2)
        for i in range(40)
    )
    client.post("/collections/s/instances", content=lines)

    results = []
    lock = threading.Lock()

    def query():
        response = client.post(
            "/collections/s/query", json={"vector": [3.0, 0.0], "k": 7}
        )
        with lock:
            results.append(response.json())

    threads = [threading.Thread(target=query) for _ in range(12)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == results[0] for r in results)
