"""Historical decision log: validated human decisions retrievable by similarity.

Reusing a validated answer shifts the attribution for it onto the human who
validated it, so only validated records are ever recalled; unvalidated
records are stored purely as an audit trail.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
from pathlib import Path
from typing import Iterable

from .core import DecisionRecord, decision_record_from_dict, decision_record_to_dict
from .errors import (
    CorruptFile,
    DimensionMismatch,
    IoFailure,
    MissingValidator,
    ZeroVectorUnderCosine,
)

DEFAULT_TAU = 0.95

LOG_FORMAT_NAME = "admexplain-decisions"


class DecisionLog:
    """Id-indexed store of decision records under cosine similarity."""

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ValueError("dimension must be a positive integer")
        self.dimension = dimension
        self._lock = threading.RLock()
        self._records: dict[str, DecisionRecord] = {}

    def __len__(self) -> int:
        return len(self._records)

    def get(self, record_id: str) -> DecisionRecord | None:
        return self._records.get(record_id)

    def records(self) -> list[DecisionRecord]:
        snap = self._records
        return [snap[i] for i in sorted(snap)]

    def record_decision(self, record: DecisionRecord) -> int:
        """Store (upsert by id); returns the record count."""
        if record.validated and not record.validator.strip():
            raise MissingValidator(f"record {record.id!r}: validated but validator empty")
        if len(record.query_embedding) != self.dimension:
            raise DimensionMismatch(
                f"record {record.id!r}: embedding length {len(record.query_embedding)} "
                f"!= log dimension {self.dimension}"
            )
        if not any(record.query_embedding):
            raise ZeroVectorUnderCosine("zero embeddings are undefined under cosine similarity")
        with self._lock:
            updated = dict(self._records)
            updated[record.id] = record
            self._records = updated
            return len(updated)

    def recall_decision(
        self, query_embedding: Iterable[float], tau: float = DEFAULT_TAU
    ) -> tuple[DecisionRecord, float] | None:
        """Highest-similarity *validated* record with similarity >= tau.

        Ties break toward the ascending id. Returns None when nothing
        clears the threshold.
        """
        if not 0.0 <= tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        q = tuple(float(x) for x in query_embedding)
        if len(q) != self.dimension:
            raise DimensionMismatch(f"query length {len(q)} != log dimension {self.dimension}")
        qn = math.sqrt(sum(x * x for x in q))
        if qn == 0.0:
            raise ZeroVectorUnderCosine("zero query embedding under cosine similarity")
        best: tuple[DecisionRecord, float] | None = None
        for record in self.records():  # ascending id
            if not record.validated:
                continue
            dot = sum(a * b for a, b in zip(record.query_embedding, q))
            rn = math.sqrt(sum(a * a for a in record.query_embedding))
            similarity = min(1.0, dot / (rn * qn))
            if similarity < tau:
                continue
            if best is None or similarity > best[1]:
                best = (record, similarity)
        return best


def persist_log(log: DecisionLog, path: str | Path) -> int:
    """Same single-file layout as collection persistence, with record fields."""
    body = "".join(
        json.dumps(decision_record_to_dict(r), sort_keys=True, ensure_ascii=False) + "\n"
        for r in log.records()
    ).encode("utf-8")
    header = {
        "format": LOG_FORMAT_NAME,
        "version": 1,
        "dimension": log.dimension,
        "count": len(log),
        "checksum": hashlib.sha256(body).hexdigest(),
    }
    payload = (json.dumps(header, sort_keys=True) + "\n").encode("utf-8") + body
    try:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return len(payload)


def load_log(path: str | Path) -> DecisionLog:
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
    if header.get("format") != LOG_FORMAT_NAME:
        raise CorruptFile(f"{path}: not a {LOG_FORMAT_NAME} file")
    if header.get("checksum") != hashlib.sha256(body).hexdigest():
        raise CorruptFile(f"{path}: checksum mismatch")
    log = DecisionLog(dimension=int(header["dimension"]))
    for line in body.decode("utf-8").splitlines():
        if line.strip():
            log.record_decision(decision_record_from_dict(json.loads(line)))
    if len(log) != int(header["count"]):
        raise CorruptFile(f"{path}: record count mismatch")
    return log
