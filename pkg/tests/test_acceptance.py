"""Acceptance suite: every top-level criterion at its stated tolerance.

Runs entirely on the offline mock backend and the deterministic test
embedder; no network access. Each test prints one pass line (visible with
``pytest -s`` or in captured output) after its assertions hold.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time
from collections import Counter

from fastapi.testclient import TestClient

from emocouncil.ballot import Tie, Vote, Winner, tally
from emocouncil.config import AppConfig
from emocouncil.context import CumulativeContext, update_context
from emocouncil.defaults import CONTEXT_UPDATE_TEMPLATE
from emocouncil.emotions import make_registry
from emocouncil.events import EventKind
from emocouncil.gateway import EmbeddingVector
from emocouncil.hashing import HashEmbedder
from emocouncil.ollama import (
    encode_chat_request,
    encode_chat_response,
    encode_embed_request,
    encode_embed_response,
    parse_chat_request,
    parse_chat_response,
    parse_embed_request,
    parse_embed_response,
)
from emocouncil.rag import SourceDocument, VectorIndex, cosine, load_corpus_dir
from emocouncil.server import create_app
from emocouncil.session import SessionManager

from conftest import CORPUS_DIR, WIRE_DIR


def report(name: str) -> None:
    print(f"[PASS] {name}")


def kind_counts(session) -> Counter:
    return Counter(e.kind for e in session.log.events())


# ---------------------------------------------------------------- criterion 1
def test_pipeline_shape_suite():
    """One Riley ask: 20 generations, 5 votes, 1 tally, 1 synthesis; barriers."""
    manager = SessionManager(AppConfig())
    session = manager.create_session("riley")
    started = time.perf_counter()
    session.ask("Should I tell them the truth?")
    elapsed = time.perf_counter() - started

    kinds = kind_counts(session)
    assert kinds[EventKind.GENERATION] == 20
    assert kinds[EventKind.VOTE] == 5
    assert kinds[EventKind.TALLY] == 1
    assert kinds[EventKind.SYNTHESIS] == 1

    events = session.log.events()
    generation_seqs: dict[int, list[int]] = {r: [] for r in range(4)}
    round_started_seq: dict[int, int] = {}
    for event in events:
        if event.kind == EventKind.GENERATION:
            generation_seqs[event.payload["round"]].append(event.seq)
        elif event.kind == EventKind.ROUND_STARTED:
            round_started_seq[event.payload["round"]] = event.seq
    for r in range(4):
        assert len(generation_seqs[r]) == 5
        assert round_started_seq[r] < min(generation_seqs[r])
        if r < 3:
            assert max(generation_seqs[r]) < round_started_seq[r + 1]
            assert max(generation_seqs[r]) < min(generation_seqs[r + 1])

    assert elapsed < 5.0
    report(
        "pipeline shape: 20 generations + 5 votes + 1 tally + 1 synthesis, "
        f"barrier ordering held, runtime {elapsed:.2f}s < 5s"
    )


# ---------------------------------------------------------------- criterion 2
def test_ballot_oracle():
    """Exhaustive size-3 (27 cases) and 10,000-case size-5 fuzz: 0 mismatches."""

    def naive_leaders(choices, registry):
        counts = {e: 0 for e in registry}
        for c in choices:
            counts[c] += 1
        best = max(counts.values())
        return frozenset(e for e in registry if counts[e] == best)

    def check(choices, registry):
        votes = [Vote(voter=registry[0], choice=c, justification="x") for c in choices]
        result = tally(votes, registry)
        leaders = naive_leaders(choices, registry)
        if len(leaders) == 1:
            assert result.outcome == Winner(next(iter(leaders)))
        else:
            assert result.outcome == Tie(leaders)

    registry3 = make_registry(["Joy", "Sadness", "Fear"])
    exhaustive = 0
    for assignment in itertools.product(registry3, repeat=3):
        check(assignment, registry3)
        exhaustive += 1
    assert exhaustive == 27

    registry5 = make_registry(["Joy", "Sadness", "Fear", "Anger", "Disgust"])
    rng = random.Random(0xBA110)
    for _ in range(10_000):
        choices = rng.choices(registry5, k=5)
        check(choices, registry5)

    report("ballot oracle: 27 exhaustive + 10000 fuzz assignments, 0 mismatches")


# ---------------------------------------------------------------- criterion 3
def test_retrieval_oracle():
    """50 random corpora (<=200 chunks) x 20 queries: exact full-scan match."""
    embedder = HashEmbedder(64)

    def embed(text: str) -> EmbeddingVector:
        return EmbeddingVector(tuple(embedder.embed(text)))

    def oracle(index: VectorIndex, query: str, k: int):
        qv = embed(query).values

        def oracle_cos(u, v):
            num = sum(x * y for x, y in zip(u, v))
            return num / (
                math.sqrt(sum(x * x for x in u)) * math.sqrt(sum(y * y for y in v))
            )

        ranked = sorted(
            (
                (-oracle_cos(qv, c.embedding.values), c.doc_id, c.ordinal)
                for c in index.chunks()
            )
        )
        return [(doc, ordinal, -neg) for neg, doc, ordinal in ranked[:k]]

    rng = random.Random(0x5EED)
    vocab = [f"word{i}" for i in range(40)]
    total_chunks = 0
    for corpus_no in range(50):
        index = VectorIndex(embed, max_chunk_chars=100)
        for d in range(rng.randint(1, 10)):
            paragraphs = [
                " ".join(rng.choices(vocab, k=rng.randint(2, 10)))
                for _ in range(rng.randint(1, 8))
            ]
            index.ingest(
                SourceDocument(f"doc{d:02d}", f"D{d}", "\n\n".join(paragraphs))
            )
        assert len(index) <= 200
        total_chunks += len(index)
        for _ in range(20):
            query = " ".join(rng.choices(vocab, k=rng.randint(1, 6)))
            k = rng.randint(1, 12)
            got = [
                (c.doc_id, c.ordinal, score)
                for c, score in index.retrieve(query, k).hits
            ]
            assert got == oracle(index, query, k)

    report(
        "retrieval oracle: 50 corpora / 1000 queries match brute-force ranking "
        f"exactly (ties included, {total_chunks} chunks total)"
    )


# ---------------------------------------------------------------- criterion 4
def test_fixture_scenario():
    """Fixture corpus: incident doc at rank 1; address reaches the synthesis prompt."""
    started = time.perf_counter()
    manager = SessionManager(AppConfig())
    count = manager.ingest_corpus(CORPUS_DIR)
    assert count >= 5
    docs = {d.id for d in load_corpus_dir(CORPUS_DIR)}
    assert docs == {"incident", "contacts", "guide_fire", "guide_earthquake",
                    "guide_flood"}

    result = manager.index.retrieve("Where is the fire happening?", k=4)
    top_chunk, top_score = result.hits[0]
    assert top_chunk.doc_id == "incident"

    session = manager.create_session("armando")
    session.ask("Where is the fire happening?")
    synthesis = [e for e in session.log.events() if e.kind == EventKind.SYNTHESIS][0]
    assert "Rua de São Bento 112" in synthesis.payload["prompt"]

    elapsed = time.perf_counter() - started
    assert elapsed < 2.0
    report(
        "fixture scenario: incident ranked 1 "
        f"(score {top_score:.3f}), address grounded the synthesis prompt, "
        f"runtime {elapsed:.2f}s < 2s"
    )


# ---------------------------------------------------------------- criterion 5
def test_mode_invariants_fuzz():
    """100 Armando asks: no THOUGHTS, no chunk leakage; 100 Riley asks: no retrieval."""
    rng = random.Random(0xA9)
    topics = ["fire", "smoke", "exit", "call", "flood", "help", "address",
              "alarm", "stairs", "number"]

    def question():
        return " ".join(rng.choices(topics, k=rng.randint(2, 6))) + "?"

    armando_manager = SessionManager(AppConfig())
    armando_manager.ingest_corpus(CORPUS_DIR)
    chunk_texts = [c.text for c in armando_manager.index.chunks()]
    armando_asks = 0
    for _ in range(20):
        session = armando_manager.create_session("armando")
        for _ in range(5):
            answer = session.ask(question())
            armando_asks += 1
            assert answer.thoughts is None
        for event in session.log.events():
            if event.kind == EventKind.GENERATION:
                blob = "".join(m["content"] for m in event.payload["prompt_messages"])
                for chunk in chunk_texts:
                    assert chunk not in blob
            if event.kind == EventKind.SYNTHESIS:
                assert event.payload["thoughts"] is None
    assert armando_asks == 100

    riley_manager = SessionManager(AppConfig())
    riley_manager.ingest_corpus(CORPUS_DIR)  # present but must stay untouched
    riley_asks = 0
    for _ in range(20):
        session = riley_manager.create_session("riley")
        for _ in range(5):
            answer = session.ask(question())
            riley_asks += 1
            assert answer.thoughts is not None
        counts = kind_counts(session)
        assert counts[EventKind.RETRIEVAL] == 0
        assert counts[EventKind.CONTEXT_UPDATE] == 0
    assert riley_asks == 100

    report(
        "mode invariants: 100 Armando asks without THOUGHTS or chunk leakage, "
        "100 Riley asks without retrieval"
    )


# ---------------------------------------------------------------- criterion 6
def test_cosine_window_context_properties():
    """Scale invariance (1e-9), 3-question window law, snapshot immutability."""
    rng = random.Random(0xC0)
    for _ in range(200):
        dim = rng.randint(2, 16)
        u = EmbeddingVector(tuple(rng.uniform(-5, 5) for _ in range(dim)))
        v = EmbeddingVector(tuple(rng.uniform(-5, 5) for _ in range(dim)))
        if all(x == 0 for x in u.values) or all(x == 0 for x in v.values):
            continue
        a = rng.uniform(1e-3, 1e3)
        b = rng.uniform(1e-3, 1e3)
        scaled_u = EmbeddingVector(tuple(a * x for x in u.values))
        scaled_v = EmbeddingVector(tuple(b * x for x in v.values))
        assert abs(cosine(scaled_u, scaled_v) - cosine(u, v)) <= 1e-9

    def chat(prompt):
        return "TOPICS: t\nSUMMARY: s"

    for trial in range(50):
        n = rng.randint(3, 10)
        questions = [f"q{trial}-{i}" for i in range(n)]
        ctx = CumulativeContext()
        for q in questions:
            ctx = update_context(
                ctx, q, "", chat=chat, template=CONTEXT_UPDATE_TEMPLATE
            ).context
        assert list(ctx.recent_questions) == questions[-3:]

    prior = CumulativeContext(
        topics=("old-topic",),
        keywords=("old-keyword",),
        recent_questions=("old-question",),
        summary="old-summary",
    )
    snapshot = (prior.topics, prior.keywords, prior.recent_questions, prior.summary)
    update_context(prior, "new question", "answer", chat=chat,
                   template=CONTEXT_UPDATE_TEMPLATE)
    assert (prior.topics, prior.keywords, prior.recent_questions,
            prior.summary) == snapshot

    report(
        "cosine scale invariance within 1e-9, window law over random pushes, "
        "prior context snapshot immutable"
    )


# ---------------------------------------------------------------- criterion 7
def test_transcript_completeness():
    """Download replays live-stream event counts and seq continuity; downloads byte-identical."""
    manager = SessionManager(AppConfig())
    client = TestClient(create_app(manager))
    sid = client.post("/sessions", json={"mode": "riley"}).json()["session_id"]
    session = manager.get(sid)

    live: list = []
    subscription = session.log.subscribe()
    try:
        # events appended before subscribing (session_start) count too
        backlog = list(session.log.events())
        response = client.post(f"/sessions/{sid}/ask", json={"question": "q"})
        assert response.status_code == 200
        while True:
            event = subscription.get(timeout=0.5)
            if event is None:
                break
            live.append(event)
    finally:
        subscription.close()
    live_all = backlog + live

    first = client.get(f"/sessions/{sid}/transcript?format=jsonl")
    second = client.get(f"/sessions/{sid}/transcript?format=jsonl")
    assert first.content == second.content

    lines = first.content.decode("utf-8").splitlines()
    assert len(lines) == len(live_all)
    replayed = [json.loads(line) for line in lines]
    assert [e["seq"] for e in replayed] == [e.seq for e in live_all]
    assert [e["seq"] for e in replayed] == list(range(1, len(lines) + 1))
    assert Counter(e["kind"] for e in replayed) == Counter(
        e.kind.value for e in live_all
    )

    report(
        f"transcript completeness: {len(lines)} downloaded events replay the "
        "live stream with gapless seq; two downloads byte-identical"
    )


# ---------------------------------------------------------------- criterion 8
def test_wire_protocol_conformance():
    """Recorded /api/chat and /api/embed fixtures round-trip bit-exactly."""
    chat_request = (WIRE_DIR / "chat_request.json").read_bytes()
    model, messages, params = parse_chat_request(chat_request)
    assert encode_chat_request(model, messages, params) == chat_request

    vision_request = (WIRE_DIR / "vision_request.json").read_bytes()
    model, messages, params = parse_chat_request(vision_request)
    assert encode_chat_request(model, messages, params) == vision_request

    chat_response = (WIRE_DIR / "chat_response.json").read_bytes()
    assert encode_chat_response(parse_chat_response(chat_response)) == chat_response

    embed_request = (WIRE_DIR / "embed_request.json").read_bytes()
    embed_model, text = parse_embed_request(embed_request)
    assert encode_embed_request(embed_model, text) == embed_request

    embed_response = (WIRE_DIR / "embed_response.json").read_bytes()
    values = parse_embed_response(embed_response)
    assert encode_embed_response("mxbai-embed-large", values) == embed_response

    report("wire conformance: 5 recorded fixtures round-trip bit-exactly")
