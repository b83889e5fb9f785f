"""Sessions: agents, context intake, the ask pipeline, event logging.

One ask runs: inject turn -> rounds 0-3 -> votes -> tally ->
[Armando only: context update + retrieval] -> synthesis. Each step lands
in the session's append-only event log; a second ask while one is in
flight fails fast with SessionBusy.
"""

from __future__ import annotations

import logging
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .ballot import BallotResult, VoteRecord, Winner, run_ballot
from .config import AppConfig
from .context import ContextUpdate, CumulativeContext, build_query, update_context
from .debate import DebateEngine, DebateTranscript
from .emotions import EmotionAgent, EmotionId, UserTurn, init_agents, make_registry
from .errors import SessionBusy, UnknownSession
from .events import EventKind, EventLog
from .gateway import BackendRole, ChatMessage, Gateway, user
from .mockbackend import MockBackend
from .ollama import OllamaBackend
from .rag import VectorIndex, enrich, load_corpus_dir
from .synthesis import FinalAnswer, SynthesisMode, synthesize

logger = logging.getLogger(__name__)

IMAGE_INSTRUCTION = (
    "Describe this image in concise prose: the scene, salient objects, any "
    "visible text, and anything safety-relevant."
)


def build_gateway(config: AppConfig) -> Gateway:
    """Gateway wired to the configured backend (live Ollama or offline mock)."""
    backend_cfg = config.backend
    models = {
        BackendRole.TEXT: backend_cfg.text_model,
        BackendRole.VISION: backend_cfg.vision_model,
        BackendRole.REASONING: backend_cfg.reasoning_model,
        BackendRole.EMBEDDING: backend_cfg.embed_model,
    }
    if backend_cfg.mode == "mock":
        backend = MockBackend(backend_cfg.embed_dimension or 256)
        embed_dimension = backend.embed_dimension
    elif backend_cfg.mode == "live":
        backend = OllamaBackend(backend_cfg.base_url, timeout_s=backend_cfg.timeout_s)
        embed_dimension = backend_cfg.embed_dimension
    else:
        raise ValueError(f"unknown backend mode: {backend_cfg.mode!r}")
    return Gateway(
        backend,
        models,
        embed_dimension=embed_dimension,
        default_temperature=backend_cfg.agent_temperature,
    )


class _EventObserver:
    """Bridges debate-engine callbacks into the session event log."""

    def __init__(self, log: EventLog):
        self._log = log

    def round_started(self, round_no: int) -> None:
        self._log.append(EventKind.ROUND_STARTED, payload={"round": round_no})

    def agent_answered(
        self,
        emotion: EmotionId,
        round_no: int,
        messages: Sequence[ChatMessage],
        response: str,
        latency_ms: float,
        params: dict,
    ) -> None:
        self._log.append(
            EventKind.GENERATION,
            emotion=emotion.name,
            payload={
                "round": round_no,
                "prompt_messages": [
                    {"role": m.role, "content": m.content} for m in messages
                ],
                "response": response,
                "params": params,
                "latency_ms": latency_ms,
            },
        )


class Session:
    """One conversation: persistent agents, cumulative context, event log."""

    def __init__(
        self,
        mode: SynthesisMode,
        config: AppConfig,
        gateway: Gateway,
        index: VectorIndex,
        *,
        session_id: str | None = None,
        transcript_path=None,
    ):
        self.id = session_id or uuid.uuid4().hex
        self.mode = mode
        self.config = config
        self.created_at = datetime.now(timezone.utc)
        self.registry = make_registry(config.emotions)
        self.agents: list[EmotionAgent] = init_agents(self.registry, config.personas)
        self.context = CumulativeContext()
        self.log = EventLog(sink_path=transcript_path)
        self._gateway = gateway
        self._index = index
        self._pending_context: str | None = None
        self._pending_image_description: str | None = None
        self._last_final_answer = ""
        self._busy = False
        self._state_lock = threading.Lock()

        self.log.append(
            EventKind.SESSION_START,
            payload={
                "session_id": self.id,
                "mode": mode.value,
                "emotions": [e.name for e in self.registry],
            },
        )
        if mode is SynthesisMode.ARMANDO and len(index) == 0:
            self.log.append(
                EventKind.WARNING,
                payload={
                    "stage": "create",
                    "message": "armando session created with an empty index; "
                    "answers will be ungrounded until a corpus is ingested",
                },
            )

    @property
    def busy(self) -> bool:
        return self._busy

    def submit_context(self, text: str) -> None:
        """Store context text verbatim for the next ask."""
        if not text:
            raise ValueError("context text must be non-empty")
        self._require_idle()
        self._pending_context = text

    def submit_image(self, image: bytes) -> str:
        """Describe the image via the vision model and store the description."""
        self._require_idle()
        description = self._gateway.describe_image(
            image, IMAGE_INSTRUCTION, tags={"stage": "input"}
        )
        self._pending_image_description = description
        self.log.append(
            EventKind.IMAGE_DESCRIPTION,
            payload={"description": description, "image_bytes": len(image)},
        )
        return description

    def ask(self, question: str) -> FinalAnswer:
        """Run the full pipeline for one question; returns the final answer."""
        with self._state_lock:
            if self._busy:
                raise SessionBusy(f"session {self.id} already has an ask in flight")
            self._busy = True
        stage = "inject"
        try:
            turn = UserTurn(
                question=question,
                context=self._pending_context,
                image_description=self._pending_image_description,
            )
            self._pending_context = None
            self._pending_image_description = None

            stage = "debate"
            transcript = self._run_debate(turn)

            stage = "ballot"
            records, ballot_result = self._run_ballot(transcript)

            rag_context: str | None = None
            if self.mode is SynthesisMode.ARMANDO:
                stage = "context_update"
                self._refresh_context(question)
                stage = "retrieval"
                rag_context = self._retrieve(question)

            stage = "synthesis"
            answer = self._synthesize(transcript, ballot_result, rag_context)
            self._last_final_answer = answer.final
            return answer
        except Exception as exc:
            self.log.append(
                EventKind.ERROR,
                emotion=getattr(exc, "emotion_name", None),
                payload={
                    "stage": stage,
                    "type": type(exc).__name__,
                    "message": str(exc),
                },
            )
            raise
        finally:
            with self._state_lock:
                self._busy = False

    def transcript_jsonl(self) -> bytes:
        return self.log.to_jsonl()

    def _require_idle(self) -> None:
        if self._busy:
            raise SessionBusy(f"session {self.id} has an ask in flight")

    def _run_debate(self, turn: UserTurn) -> DebateTranscript:
        observer = _EventObserver(self.log)
        engine = DebateEngine(
            self._gateway,
            self.config.debate,
            temperature=self.config.backend.agent_temperature,
            seed=self.config.backend.seed,
            observer=observer,
        )
        return engine.run_debate(self.agents, turn)

    def _run_ballot(
        self, transcript: DebateTranscript
    ) -> tuple[list[VoteRecord], BallotResult]:
        armando = self.mode is SynthesisMode.ARMANDO
        records, result = run_ballot(
            self.agents,
            transcript.candidates,
            gateway=self._gateway,
            template=self.config.ballot.vote_template,
            role=BackendRole.TEXT if armando else BackendRole.REASONING,
            preamble=self.config.synthesis.armando_preamble if armando else None,
            temperature=self.config.backend.adjudication_temperature,
            seed=self.config.backend.seed,
            on_record=self._log_vote,
        )
        outcome = result.outcome
        self.log.append(
            EventKind.TALLY,
            payload={
                "tally": {e.name: n for e, n in result.tally.items()},
                "outcome": {
                    "type": "winner" if isinstance(outcome, Winner) else "tie",
                    "emotions": sorted(e.name for e in result.outcome_set),
                },
                "votes": [
                    {
                        "voter": v.voter.name,
                        "choice": v.choice.name,
                        "justification": v.justification,
                    }
                    for v in result.votes
                ],
                "abstentions": [r.voter.name for r in records if r.abstained],
            },
        )
        return records, result

    def _log_vote(self, record: VoteRecord) -> None:
        payload = {
            "abstained": record.abstained,
            "prompt": record.prompt,
            "raw_attempts": record.raw_attempts,
            "latency_ms": record.latency_ms,
        }
        if record.vote is not None:
            payload["choice"] = record.vote.choice.name
            payload["justification"] = record.vote.justification
        self.log.append(EventKind.VOTE, emotion=record.voter.name, payload=payload)

    def _refresh_context(self, question: str) -> None:
        def chat(prompt: str) -> str:
            reply = self._gateway.chat(
                BackendRole.TEXT,
                [user(prompt)],
                self._gateway.params_for(
                    BackendRole.TEXT,
                    temperature=self.config.backend.adjudication_temperature,
                    seed=self.config.backend.seed,
                ),
                tags={"stage": "context_update"},
            )
            return reply.content

        update: ContextUpdate = update_context(
            self.context,
            question,
            self._last_final_answer,
            chat=chat,
            template=self.config.rag.context_template,
        )
        self.context = update.context
        self.log.append(
            EventKind.CONTEXT_UPDATE,
            payload={
                "recent_questions": list(update.context.recent_questions),
                "keywords": list(update.context.keywords),
                "topics": list(update.context.topics),
                "summary": update.context.summary,
                "degraded": update.degraded,
                "prompt": update.prompt,
                "raw_response": update.raw_response,
            },
        )

    def _retrieve(self, question: str) -> str | None:
        query = build_query(self.context, question)
        text, result = self._retrieval_scan(query)
        if result is None:
            self.log.append(
                EventKind.WARNING,
                payload={
                    "stage": "retrieval",
                    "message": "index empty; synthesis proceeds ungrounded",
                },
            )
            return None
        self.log.append(
            EventKind.RETRIEVAL,
            payload={
                "query": query,
                "k": self.config.rag.k,
                "hits": [
                    {
                        "doc_id": chunk.doc_id,
                        "ordinal": chunk.ordinal,
                        "title": self._index.title_for(chunk.doc_id),
                        "score": score,
                        "text": chunk.text,
                    }
                    for chunk, score in result.hits
                ],
            },
        )
        return text or None

    def _retrieval_scan(self, query: str):
        return enrich(self._index, query, self.config.rag.k)

    def _synthesize(
        self,
        transcript: DebateTranscript,
        ballot_result: BallotResult,
        rag_context: str | None,
    ) -> FinalAnswer:
        answer, info = synthesize(
            transcript,
            ballot_result,
            self.mode,
            rag_context,
            gateway=self._gateway,
            settings=self.config.synthesis,
            temperature=self.config.backend.adjudication_temperature,
            seed=self.config.backend.seed,
        )
        self.log.append(
            EventKind.SYNTHESIS,
            payload={
                "mode": self.mode.value,
                "prompt": info["prompt"],
                "raw": info["raw"],
                "params": info["params"],
                "latency_ms": info["latency_ms"],
                "reasoning": answer.reasoning,
                "thoughts": answer.thoughts,
                "final": answer.final,
                "winning_emotions": sorted(e.name for e in answer.winning_emotions),
            },
        )
        return answer


class SessionManager:
    """All live sessions plus the shared gateway and retrieval index."""

    def __init__(
        self,
        config: AppConfig | None = None,
        *,
        gateway: Gateway | None = None,
        transcripts_dir=None,
    ):
        self.config = config or AppConfig()
        self.gateway = gateway or build_gateway(self.config)
        self.index = VectorIndex(
            lambda text: self.gateway.embed(text, tags={"stage": "index"}),
            max_chunk_chars=self.config.rag.max_chunk_chars,
        )
        self._transcripts_dir = transcripts_dir
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create_session(
        self, mode: SynthesisMode | str, overrides: dict | None = None
    ) -> Session:
        mode = SynthesisMode(mode) if isinstance(mode, str) else mode
        config = self.config.with_overrides(overrides)
        session_id = uuid.uuid4().hex
        transcript_path = None
        if self._transcripts_dir is not None:
            transcript_path = Path(self._transcripts_dir) / f"{session_id}.jsonl"
        session = Session(
            mode,
            config,
            self.gateway,
            self.index,
            session_id=session_id,
            transcript_path=transcript_path,
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def ingest_corpus(self, directory) -> int:
        """Ingest every document in a corpus directory; returns chunk total."""
        total = 0
        for doc in load_corpus_dir(directory):
            total += self.index.ingest(doc)
        return total
