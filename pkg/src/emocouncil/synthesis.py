"""Final synthesis: one segmented answer from the debate and the ballot.

A winner-led prompt foregrounds the winning emotion's final answer and its
voters' justifications; a tie presents every tied perspective with equal
prominence. Armando mode runs on the plain text backend with a
reasoning-emulation preamble, grounds the prompt in retrieved VERIFIED
INFORMATION, and never emits a THOUGHTS segment.
"""

from __future__ import annotations

import logging
import re
import time
from dataclasses import dataclass
from enum import Enum

from .ballot import BallotResult, Winner, strip_think_spans
from .config import SynthesisSettings
from .debate import DebateTranscript
from .emotions import EmotionId
from .errors import MalformedSynthesis, MissingFinalAnswer
from .gateway import BackendRole, Gateway, user

logger = logging.getLogger(__name__)

REASONING_HEADER = "REASONING:"
THOUGHTS_HEADER = "THOUGHTS:"
FINAL_HEADER = "FINAL ANSWER:"

SEGMENT_INSTRUCTIONS_RILEY = (
    "Structure your reply as exactly these labeled sections, each header at "
    "the start of its own line:\n"
    "REASONING: your analytical assessment of the deliberation\n"
    "THOUGHTS: the internal reflection behind the answer\n"
    "FINAL ANSWER: the balanced, consumable answer for the user"
)

SEGMENT_INSTRUCTIONS_ARMANDO = (
    "Structure your reply as exactly these labeled sections, each header at "
    "the start of its own line:\n"
    "REASONING: your analytical assessment of the deliberation\n"
    "FINAL ANSWER: the balanced, consumable answer for the user"
)


class SynthesisMode(str, Enum):
    RILEY = "riley"
    ARMANDO = "armando"


@dataclass(frozen=True)
class FinalAnswer:
    """Segmented answer; ``thoughts`` is None exactly in Armando mode."""

    reasoning: str
    thoughts: str | None
    final: str
    winning_emotions: frozenset[EmotionId]

    def __post_init__(self):
        if not self.final:
            raise ValueError("final segment must be non-empty")

    def render(self) -> str:
        lines = [f"{REASONING_HEADER} {self.reasoning}"]
        if self.thoughts is not None:
            lines.append(f"{THOUGHTS_HEADER} {self.thoughts}")
        lines.append(f"{FINAL_HEADER} {self.final}")
        return "\n".join(lines)


def _header_re(header: str) -> re.Pattern:
    return re.compile(rf"^[ \t]*{re.escape(header)}", re.IGNORECASE | re.MULTILINE)


_HEADER_PATTERNS = {
    name: _header_re(name)
    for name in (REASONING_HEADER, THOUGHTS_HEADER, FINAL_HEADER)
}


@dataclass(frozen=True)
class ParsedSegments:
    reasoning: str
    thoughts: str | None
    final: str


def parse_segments(raw: str, mode: SynthesisMode) -> ParsedSegments:
    """Split raw output on the three headers, order-independent.

    Only the first occurrence of each header counts; anything before the
    first header is discarded (logged). A missing REASONING section
    defaults to empty text with a warning; a THOUGHTS section in Armando
    output is parsed but dropped. Raises MissingFinalAnswer when no FINAL
    ANSWER header exists.
    """
    if not raw:
        raise ValueError("raw synthesis output must be non-empty")
    cleaned = strip_think_spans(raw)
    found = []
    for name, pattern in _HEADER_PATTERNS.items():
        match = pattern.search(cleaned)
        if match:
            found.append((match.start(), match.end(), name))
    found.sort()
    sections: dict[str, str] = {}
    for i, (start, end, name) in enumerate(found):
        stop = found[i + 1][0] if i + 1 < len(found) else len(cleaned)
        sections[name] = cleaned[end:stop].strip()
    if FINAL_HEADER not in sections or not sections[FINAL_HEADER]:
        raise MissingFinalAnswer("no FINAL ANSWER section in synthesis output")
    if found and found[0][0] > 0:
        preamble = cleaned[: found[0][0]].strip()
        if preamble:
            logger.warning("discarding text before first header: %r", preamble[:120])

    reasoning = sections.get(REASONING_HEADER)
    if reasoning is None:
        logger.warning("synthesis output missing REASONING section")
        reasoning = ""
    thoughts = sections.get(THOUGHTS_HEADER)
    if mode is SynthesisMode.ARMANDO and thoughts is not None:
        logger.warning("dropping THOUGHTS section from Armando output")
        thoughts = None
    return ParsedSegments(reasoning=reasoning, thoughts=thoughts, final=sections[FINAL_HEADER])


def build_synthesis_prompt(
    transcript: DebateTranscript,
    ballot: BallotResult,
    mode: SynthesisMode,
    rag_context: str | None,
    settings: SynthesisSettings,
) -> str:
    """Synthesis prompt: winner-led or tie-balanced, optionally RAG-grounded."""
    candidates = transcript.candidates
    instructions = (
        SEGMENT_INSTRUCTIONS_RILEY
        if mode is SynthesisMode.RILEY
        else SEGMENT_INSTRUCTIONS_ARMANDO
    )
    if rag_context:
        instructions = (
            f"VERIFIED INFORMATION:\n{rag_context}\n\n"
            "Ground every factual claim in the VERIFIED INFORMATION above; "
            "do not invent facts beyond it.\n\n" + instructions
        )
    if isinstance(ballot.outcome, Winner):
        winner = ballot.outcome.emotion
        justifications = "\n".join(
            f"- {v.voter.name}: {v.justification}"
            for v in sorted(
                (v for v in ballot.votes if v.choice == winner),
                key=lambda v: v.voter.name,
            )
        )
        body = settings.winner_template.format(
            winner=winner.name,
            winner_answer=candidates[winner],
            justifications=justifications,
            segment_instructions=instructions,
        )
    else:
        tied = ballot.outcome.emotions
        tied_answers = "\n\n".join(
            f"{e.name}: {candidates[e]}"
            for e in sorted(tied, key=lambda e: e.name)
        )
        body = settings.tie_template.format(
            tied_answers=tied_answers,
            segment_instructions=instructions,
        )
    if mode is SynthesisMode.ARMANDO:
        body = f"{settings.armando_preamble}\n\n{body}"
    return body


def synthesize(
    transcript: DebateTranscript,
    ballot: BallotResult,
    mode: SynthesisMode,
    rag_context: str | None,
    *,
    gateway: Gateway,
    settings: SynthesisSettings,
    temperature: float = 0.2,
    seed: int | None = None,
) -> tuple[FinalAnswer, dict]:
    """Run the synthesis call and parse its segments, retrying once.

    Riley uses the reasoning backend; Armando emulates reasoning on the
    text backend. Returns the FinalAnswer plus a call-info dict (prompt,
    raw output, params, latency) for logging.
    """
    prompt = build_synthesis_prompt(transcript, ballot, mode, rag_context, settings)
    role = (
        BackendRole.REASONING if mode is SynthesisMode.RILEY else BackendRole.TEXT
    )
    params = gateway.params_for(role, temperature=temperature, seed=seed)
    messages = [user(prompt)]

    raw = ""
    started = time.perf_counter()
    for attempt in range(2):
        reply = gateway.chat(
            role, messages, params, tags={"stage": "synthesis", "attempt": attempt}
        )
        raw = reply.content
        try:
            segments = parse_segments(raw, mode)
        except MissingFinalAnswer:
            logger.warning("synthesis attempt %d unparseable", attempt + 1)
            continue
        latency_ms = (time.perf_counter() - started) * 1000.0
        answer = FinalAnswer(
            reasoning=segments.reasoning,
            thoughts=(
                None
                if mode is SynthesisMode.ARMANDO
                else (segments.thoughts if segments.thoughts is not None else "")
            ),
            final=segments.final,
            winning_emotions=ballot.outcome_set,
        )
        info = {
            "prompt": prompt,
            "raw": raw,
            "params": params.as_dict(),
            "latency_ms": latency_ms,
            "attempts": attempt + 1,
        }
        return answer, info
    raise MalformedSynthesis(raw)
