"""Cumulative conversational context driving retrieval queries.

Tracks key topics, term-frequency keywords, the three most recent user
questions, and a model-generated running summary. Contexts are immutable;
updates return a new snapshot so concurrent readers never see a torn state.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable

from .hashing import tokenize

logger = logging.getLogger(__name__)

RECENT_QUESTION_CAPACITY = 3
KEYWORD_LIMIT = 10

STOP_WORDS = frozenset(
    """
    a about above after again against all am an and any are aren as at be
    because been before being below between both but by can cannot could
    couldn did didn do does doesn doing don down during each few for from
    further had hadn has hasn have haven having he her here hers herself
    him himself his how i if in into is isn it its itself just me more
    most mustn my myself no nor not now of off on once only or other our
    ours ourselves out over own s same shan she should shouldn so some
    such t than that the their theirs them themselves then there these
    they this those through to too under until up very was wasn we were
    weren what when where which while who whom why will with won would
    wouldn you your yours yourself yourselves
    """.split()
)

_TOPICS_RE = re.compile(r"^\s*topics:\s*(.*)$", re.IGNORECASE | re.MULTILINE)
_SUMMARY_RE = re.compile(r"^\s*summary:\s*(.*)$", re.IGNORECASE | re.MULTILINE)


@dataclass(frozen=True)
class CumulativeContext:
    topics: tuple[str, ...] = ()
    keywords: tuple[str, ...] = ()
    recent_questions: tuple[str, ...] = ()
    summary: str = ""

    def __post_init__(self):
        if len(self.recent_questions) > RECENT_QUESTION_CAPACITY:
            raise ValueError(
                f"recent_questions holds at most {RECENT_QUESTION_CAPACITY}"
            )

    @property
    def empty(self) -> bool:
        return not (
            self.topics or self.keywords or self.recent_questions or self.summary
        )


@dataclass(frozen=True)
class ContextUpdate:
    """Result of one update: the new snapshot plus logging material."""

    context: CumulativeContext
    degraded: bool
    prompt: str
    raw_response: str


def extract_keywords(text: str, limit: int = KEYWORD_LIMIT) -> tuple[str, ...]:
    """Top terms by frequency after stop-word removal; ties alphabetical."""
    counts = Counter(t for t in tokenize(text) if t not in STOP_WORDS)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return tuple(term for term, _ in ranked[:limit])


def build_query(ctx: CumulativeContext, question: str) -> str:
    """Retrieval query: the question first, then keywords, topics, summary."""
    if not question:
        raise ValueError("question must be non-empty")
    if ctx.empty:
        return question
    parts = [question]
    if ctx.keywords:
        parts.append("Keywords: " + ", ".join(ctx.keywords))
    if ctx.topics:
        parts.append("Topics: " + ", ".join(ctx.topics))
    if ctx.summary:
        parts.append("Summary: " + ctx.summary)
    return "\n".join(parts)


def update_context(
    ctx: CumulativeContext,
    question: str,
    final_answer: str,
    *,
    chat: Callable[[str], str],
    template: str,
) -> ContextUpdate:
    """New context with the question pushed into the 3-slot window.

    Keywords are recomputed from the latest exchange; topics and summary
    are regenerated by one text-model call. If that call fails or its
    reply is unparseable, the stale topics/summary are retained (degraded)
    while the window and keywords still advance.
    """
    if not question:
        raise ValueError("question must be non-empty")
    window = (*ctx.recent_questions, question)[-RECENT_QUESTION_CAPACITY:]
    keywords = extract_keywords(f"{question} {final_answer}")

    prompt = template.format(
        questions="; ".join(window),
        summary=ctx.summary or "(none)",
        question=question,
        answer=final_answer or "(none yet)",
    )
    topics = ctx.topics
    summary = ctx.summary
    degraded = False
    raw = ""
    try:
        raw = chat(prompt)
    except Exception as exc:
        logger.warning("context refresh failed, keeping stale summary: %s", exc)
        degraded = True
    if not degraded:
        topics_match = _TOPICS_RE.search(raw)
        summary_match = _SUMMARY_RE.search(raw)
        if topics_match and topics_match.group(1).strip():
            topics = tuple(
                t.strip() for t in topics_match.group(1).split(",") if t.strip()
            )
        else:
            degraded = True
        if summary_match and summary_match.group(1).strip():
            summary = summary_match.group(1).strip()
        else:
            degraded = True
        if degraded:
            logger.warning("context refresh reply unparseable, keeping stale values")
    new_ctx = CumulativeContext(
        topics=topics,
        keywords=keywords,
        recent_questions=window,
        summary=summary,
    )
    return ContextUpdate(new_ctx, degraded, prompt, raw)
