"""Grounding store: document chunks, embeddings, exhaustive-scan retrieval.

The corpus is a handful of authoritative documents, so the "index" is a
brute-force cosine scan over every chunk; ranking ties break on
(doc_id, ordinal) ascending. Snapshots persist to a single versioned file
(JSON header and chunk records, embeddings packed as little-endian float32,
so loaded values are float32-quantized).
"""

from __future__ import annotations

import json
import logging
import math
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .errors import (
    DimensionMismatch,
    EmbeddingFailure,
    EmptyIndex,
    SnapshotFormatError,
    ZeroVector,
)
from .gateway import EmbeddingVector

logger = logging.getLogger(__name__)

SNAPSHOT_FORMAT = "emocouncil-index"
SNAPSHOT_VERSION = 1

EmbedFn = Callable[[str], EmbeddingVector]


@dataclass(frozen=True)
class SourceDocument:
    id: str
    title: str
    body: str
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")
        if not self.body.strip():
            raise ValueError("document body must be non-empty")


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    ordinal: int
    text: str
    embedding: EmbeddingVector


@dataclass(frozen=True)
class RetrievalResult:
    hits: tuple[tuple[Chunk, float], ...]
    query_text: str


def split_chunks(body: str, max_chars: int) -> list[str]:
    """Blank-line paragraphs packed greedily up to ``max_chars``, no overlap.

    A single paragraph longer than the limit is hard-split.
    """
    paragraphs = [p.strip() for p in body.split("\n\n") if p.strip()]
    pieces: list[str] = []
    for para in paragraphs:
        while len(para) > max_chars:
            pieces.append(para[:max_chars])
            para = para[max_chars:].strip()
        if para:
            pieces.append(para)
    chunks: list[str] = []
    buffer = ""
    for piece in pieces:
        if not buffer:
            buffer = piece
        elif len(buffer) + 2 + len(piece) <= max_chars:
            buffer = f"{buffer}\n\n{piece}"
        else:
            chunks.append(buffer)
            buffer = piece
    if buffer:
        chunks.append(buffer)
    return chunks


def cosine(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """Cosine similarity in [-1, 1]; rejects mismatched or zero vectors."""
    if u.dimension != v.dimension:
        raise DimensionMismatch(
            f"cosine over {u.dimension}-d and {v.dimension}-d vectors"
        )
    dot = sum(a * b for a, b in zip(u.values, v.values))
    norm_u = math.sqrt(sum(a * a for a in u.values))
    norm_v = math.sqrt(sum(b * b for b in v.values))
    if norm_u == 0.0 or norm_v == 0.0:
        raise ZeroVector("cosine is undefined for a zero vector")
    return dot / (norm_u * norm_v)


class VectorIndex:
    """In-memory chunk index with atomic ingest and exhaustive retrieval.

    Concurrent readers see consistent snapshots: writers build a new chunk
    list under the lock and swap the reference.
    """

    def __init__(self, embed_fn: EmbedFn, *, max_chunk_chars: int = 1500):
        self._embed_fn = embed_fn
        self._max_chunk_chars = max_chunk_chars
        self._chunks: tuple[Chunk, ...] = ()
        self._docs: dict[str, SourceDocument] = {}
        self._dimension: int | None = None
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._chunks)

    @property
    def dimension(self) -> int | None:
        return self._dimension

    def chunks(self) -> tuple[Chunk, ...]:
        return self._chunks

    def title_for(self, doc_id: str) -> str:
        doc = self._docs.get(doc_id)
        return doc.title if doc else doc_id

    def ingest(self, doc: SourceDocument) -> int:
        """Chunk, embed, and store one document; returns the chunk count.

        Re-ingesting an id replaces its previous chunks (ordinals restart
        at 0). Any embedding failure aborts the whole document: the index
        is left exactly as it was.
        """
        texts = split_chunks(doc.body, self._max_chunk_chars)
        embedded: list[Chunk] = []
        for ordinal, text in enumerate(texts):
            try:
                vector = self._embed_fn(text)
            except Exception as exc:
                raise EmbeddingFailure(
                    f"embedding chunk {ordinal} of {doc.id!r} failed: {exc}"
                ) from exc
            if self._dimension is not None and vector.dimension != self._dimension:
                raise EmbeddingFailure(
                    f"chunk embedding dimension {vector.dimension} != index "
                    f"dimension {self._dimension}"
                )
            embedded.append(Chunk(doc.id, ordinal, text, vector))
        with self._write_lock:
            kept = [c for c in self._chunks if c.doc_id != doc.id]
            self._chunks = tuple(kept + embedded)
            self._docs[doc.id] = doc
            if self._dimension is None and embedded:
                self._dimension = embedded[0].embedding.dimension
        return len(embedded)

    def retrieve(self, query: str, k: int) -> RetrievalResult:
        """Top-k chunks by cosine similarity; ties break on (doc_id, ordinal)."""
        if k <= 0:
            raise ValueError("k must be positive")
        chunks = self._chunks
        if not chunks:
            raise EmptyIndex("no chunks ingested")
        query_vector = self._embed_fn(query)
        scored = [(chunk, cosine(query_vector, chunk.embedding)) for chunk in chunks]
        scored.sort(key=lambda cs: (-cs[1], cs[0].doc_id, cs[0].ordinal))
        return RetrievalResult(hits=tuple(scored[:k]), query_text=query)

    def save(self, path: str | Path) -> None:
        """Write the versioned snapshot (embeddings as little-endian float32)."""
        chunks = self._chunks
        header = {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "dimension": self._dimension or 0,
            "chunks": len(chunks),
        }
        docs = {
            doc_id: {"title": d.title, "body": d.body, "metadata": d.metadata}
            for doc_id, d in self._docs.items()
        }
        with open(path, "wb") as fh:
            fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
            fh.write(json.dumps(docs, sort_keys=True).encode("utf-8") + b"\n")
            for chunk in chunks:
                meta = {
                    "doc_id": chunk.doc_id,
                    "ordinal": chunk.ordinal,
                    "text": chunk.text,
                }
                fh.write(json.dumps(meta, sort_keys=True).encode("utf-8") + b"\n")
            for chunk in chunks:
                fh.write(struct.pack(f"<{chunk.embedding.dimension}f", *chunk.embedding.values))

    @classmethod
    def load(
        cls, path: str | Path, embed_fn: EmbedFn, *, max_chunk_chars: int = 1500
    ) -> "VectorIndex":
        with open(path, "rb") as fh:
            header = json.loads(fh.readline())
            if header.get("format") != SNAPSHOT_FORMAT:
                raise SnapshotFormatError(f"not an index snapshot: {path}")
            if header.get("version") != SNAPSHOT_VERSION:
                raise SnapshotFormatError(
                    f"unsupported snapshot version {header.get('version')!r}"
                )
            dimension = header["dimension"]
            count = header["chunks"]
            docs_raw = json.loads(fh.readline())
            metas = [json.loads(fh.readline()) for _ in range(count)]
            chunks = []
            for meta in metas:
                blob = fh.read(4 * dimension)
                if len(blob) != 4 * dimension:
                    raise SnapshotFormatError("snapshot truncated")
                values = struct.unpack(f"<{dimension}f", blob)
                chunks.append(
                    Chunk(meta["doc_id"], meta["ordinal"], meta["text"], EmbeddingVector(values))
                )
        index = cls(embed_fn, max_chunk_chars=max_chunk_chars)
        index._chunks = tuple(chunks)
        index._dimension = dimension or None
        index._docs = {
            doc_id: SourceDocument(doc_id, d["title"], d["body"], d.get("metadata", {}))
            for doc_id, d in docs_raw.items()
        }
        return index


def load_corpus_dir(directory: str | Path) -> list[SourceDocument]:
    """Documents from a directory of UTF-8 text files.

    The first line of each file is front matter: "# title | kind". The file
    stem becomes the document id.
    """
    directory = Path(directory)
    documents = []
    for file_path in sorted(directory.glob("*.txt")):
        raw = file_path.read_text(encoding="utf-8")
        first, _, body = raw.partition("\n")
        if not first.startswith("#"):
            raise ValueError(
                f"{file_path.name}: first line must be '# title | kind'"
            )
        title, _, kind = first.lstrip("#").strip().partition("|")
        documents.append(
            SourceDocument(
                id=file_path.stem,
                title=title.strip(),
                body=body,
                metadata={"kind": kind.strip() or "unknown"},
            )
        )
    return documents


def enrich(
    index: VectorIndex, query: str, k: int
) -> tuple[str, RetrievalResult | None]:
    """Concatenated top-k chunk texts with their source titles.

    An empty index degrades to empty grounding (with a warning) so the
    synthesis can still proceed.
    """
    try:
        result = index.retrieve(query, k)
    except EmptyIndex:
        logger.warning("retrieval skipped: index is empty; answering ungrounded")
        return "", None
    blocks = [
        f"[{index.title_for(chunk.doc_id)}] {chunk.text}"
        for chunk, _score in result.hits
    ]
    return "\n\n".join(blocks), result
