"""Documentation-analysis harness: deterministic text embeddings, influential
passage retrieval and validated-answer reuse.

The embedding is a hashed term-frequency vector (FNV-1a token hash into a
fixed number of buckets, L2-normalized), which keeps the harness fully
offline and reproducible. Real learned embeddings can be ingested through
the standard instance format instead.

Answers deliberately carry no confidence score or correctness probability
anywhere in their payload: a retrieval either recalls a validated past
answer (attributed to its human validator) or surfaces the influential
passages, nothing in between.
"""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Iterable

from .core import EPOCH, Instance
from .decisions import DEFAULT_TAU, DecisionLog
from .errors import EmptyCorpus, EmptyText
from .store import Collection, Metric

EMBED_DIMENSION = 256
CHUNK_MAX_TOKENS = 200

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_FNV_MASK = (1 << 64) - 1


def fnv1a64(token: str) -> int:
    """64-bit FNV-1a hash of the token's UTF-8 bytes."""
    h = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _FNV_MASK
    return h


def tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def token_bucket(token: str, dimension: int = EMBED_DIMENSION) -> int:
    return fnv1a64(token) % dimension


def embed_text(text: str, dimension: int = EMBED_DIMENSION) -> tuple[float, ...]:
    """Unit-length hashed term-frequency vector; identical text, identical vector."""
    tokens = tokenize(text)
    if not tokens:
        raise EmptyText("text has no tokens to embed")
    counts = [0.0] * dimension
    for token in tokens:
        counts[token_bucket(token, dimension)] += 1.0
    norm = math.sqrt(sum(c * c for c in counts))
    return tuple(c / norm for c in counts)


def chunk_text(text: str, max_tokens: int = CHUNK_MAX_TOKENS) -> list[str]:
    """Split on blank lines; paragraphs longer than max_tokens are sliced."""
    chunks = []
    for paragraph in re.split(r"\n\s*\n", text):
        words = paragraph.split()
        if not words:
            continue
        for start in range(0, len(words), max_tokens):
            chunks.append(" ".join(words[start : start + max_tokens]))
    return chunks


def build_corpus(
    documents: Iterable[tuple[str, str]],
    dimension: int = EMBED_DIMENSION,
    name: str = "docs-corpus",
) -> Collection:
    """Chunk and embed (doc_id, text) pairs into a cosine collection.

    Chunk ids are ``{doc_id}#{index}``; the chunk text rides along in the
    metadata so retrieved passages can be displayed verbatim.
    """
    corpus = Collection(name, dimension=dimension, metric=Metric.COSINE)
    for doc_id, text in documents:
        for idx, chunk in enumerate(chunk_text(text)):
            corpus.upsert(
                Instance(
                    id=f"{doc_id}#{idx}",
                    embedding=embed_text(chunk, dimension),
                    metadata={"source": doc_id, "chunk_index": str(idx), "text": chunk},
                    timestamp=EPOCH,
                )
            )
    return corpus


def load_corpus_dir(directory: str | Path, dimension: int = EMBED_DIMENSION) -> Collection:
    path = Path(directory)
    docs = [(p.name, p.read_text(encoding="utf-8")) for p in sorted(path.glob("*.txt"))]
    return build_corpus(docs, dimension)


def influential_passages(
    corpus: Collection, query_text: str, k: int = 5
) -> list[tuple[str, float]]:
    """Top-k chunks by cosine similarity to the query (ties by ascending id)."""
    if len(corpus) == 0:
        raise EmptyCorpus("the corpus holds no chunks")
    query = embed_text(query_text, corpus.dimension)
    hits = corpus.knn_query(query, k)
    return [(cid, min(1.0, 1.0 - dist)) for cid, dist in hits]


def answer_with_provenance(
    corpus: Collection,
    log: DecisionLog,
    query_text: str,
    tau: float = DEFAULT_TAU,
    k: int = 5,
) -> dict:
    """Validated past answer when one matches at ``tau``, else passages only.

    The payload never contains a confidence or correctness-probability
    field; a recalled answer names the human validator instead.
    """
    query = embed_text(query_text, corpus.dimension)
    hit = log.recall_decision(query, tau)
    if hit is not None:
        record, similarity = hit
        return {
            "source": "ValidatedLog",
            "answer": record.decision,
            "validator": record.validator,
            "record_id": record.id,
            "justification": record.justification,
            "similarity": similarity,
        }
    passages = [
        {
            "id": cid,
            "document": corpus.get(cid).metadata.get("source", ""),
            "text": corpus.get(cid).metadata.get("text", ""),
            "similarity": similarity,
        }
        for cid, similarity in influential_passages(corpus, query_text, k)
    ]
    return {"source": "PassagesOnly", "passages": passages}
