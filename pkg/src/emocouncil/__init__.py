"""Emotion-council chat pipeline.

Five emotion personas debate a question over four rounds, vote with
justifications, and a synthesis step emits a segmented final answer.
Armando mode adds retrieval-grounded answers for emergency scenarios.
"""

from .ballot import BallotResult, Tie, Vote, Winner, cast_vote, run_ballot, tally
from .config import AppConfig, load_config
from .context import CumulativeContext, build_query, update_context
from .debate import DebateEngine, DebateTranscript, RoundOutputs
from .emotions import (
    EmotionAgent,
    EmotionId,
    UserTurn,
    init_agents,
    inject_user_turn,
    make_registry,
)
from .events import EventKind, EventLog, LogEvent
from .gateway import (
    BackendRole,
    ChatMessage,
    EmbeddingVector,
    Gateway,
    GenerationParams,
)
from .mockbackend import MockBackend
from .rag import SourceDocument, VectorIndex, cosine, load_corpus_dir
from .session import Session, SessionManager, build_gateway
from .synthesis import FinalAnswer, SynthesisMode, parse_segments, synthesize

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "BackendRole",
    "BallotResult",
    "ChatMessage",
    "CumulativeContext",
    "DebateEngine",
    "DebateTranscript",
    "EmbeddingVector",
    "EmotionAgent",
    "EmotionId",
    "EventKind",
    "EventLog",
    "FinalAnswer",
    "Gateway",
    "GenerationParams",
    "LogEvent",
    "MockBackend",
    "RoundOutputs",
    "Session",
    "SessionManager",
    "SourceDocument",
    "SynthesisMode",
    "Tie",
    "UserTurn",
    "VectorIndex",
    "Vote",
    "Winner",
    "build_gateway",
    "build_query",
    "cast_vote",
    "cosine",
    "init_agents",
    "inject_user_turn",
    "load_config",
    "load_corpus_dir",
    "make_registry",
    "parse_segments",
    "run_ballot",
    "synthesize",
    "tally",
    "update_context",
]
