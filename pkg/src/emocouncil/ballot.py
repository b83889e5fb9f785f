"""Voting and tally: each agent casts one justified vote; plurality decides.

Votes are parsed from "VOTE: <name>" / "JUSTIFICATION: <text>" lines
(case-insensitive, line-anchored). An agent whose response stays
unparseable after two attempts abstains: its vote is excluded from the
tally and the abstention is recorded.
"""

from __future__ import annotations

import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .emotions import EmotionAgent, EmotionId, resolve
from .errors import UnparseableVote
from .gateway import BackendRole, Gateway, user

logger = logging.getLogger(__name__)

MAX_VOTE_ATTEMPTS = 2

_THINK_RE = re.compile(r"<think>.*?</think>", re.IGNORECASE | re.DOTALL)
_VOTE_RE = re.compile(r"^\s*vote:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE)
_JUSTIFICATION_RE = re.compile(
    r"^\s*justification:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE
)


def strip_think_spans(text: str) -> str:
    """Remove well-formed <think>...</think> spans emitted by reasoning models."""
    return _THINK_RE.sub("", text)


@dataclass(frozen=True)
class Vote:
    voter: EmotionId
    choice: EmotionId
    justification: str

    def __post_init__(self):
        if not self.justification:
            raise ValueError("justification must be non-empty")


@dataclass(frozen=True)
class Winner:
    emotion: EmotionId


@dataclass(frozen=True)
class Tie:
    emotions: frozenset[EmotionId]


@dataclass(frozen=True)
class BallotResult:
    votes: tuple[Vote, ...]
    tally: dict[EmotionId, int]
    outcome: Winner | Tie

    @property
    def outcome_set(self) -> frozenset[EmotionId]:
        if isinstance(self.outcome, Winner):
            return frozenset({self.outcome.emotion})
        return self.outcome.emotions


@dataclass
class VoteRecord:
    """One voter's attempt trail; ``vote`` is None for an abstention."""

    voter: EmotionId
    vote: Vote | None
    prompt: str
    raw_attempts: list[str]
    latency_ms: float

    @property
    def abstained(self) -> bool:
        return self.vote is None


def parse_vote(
    raw: str, voter: EmotionId, registry: Sequence[EmotionId]
) -> Vote | None:
    """Vote parsed from a model response, or None if unparseable."""
    cleaned = strip_think_spans(raw)
    vote_match = _VOTE_RE.search(cleaned)
    justification_match = _JUSTIFICATION_RE.search(cleaned)
    if not vote_match or not justification_match:
        return None
    choice = resolve(registry, vote_match.group(1).strip(" \t.,!;:*\"'"))
    if choice is None:
        return None
    justification = justification_match.group(1)
    if not justification:
        return None
    return Vote(voter=voter, choice=choice, justification=justification)


def candidate_block(candidates: dict[EmotionId, str]) -> str:
    # sorted by name: prompts must not depend on agent scheduling order
    return "\n\n".join(
        f"{e.name}: {candidates[e]}"
        for e in sorted(candidates, key=lambda e: e.name)
    )


def cast_vote(
    agent: EmotionAgent,
    candidates: dict[EmotionId, str],
    *,
    gateway: Gateway,
    template: str,
    role: BackendRole = BackendRole.REASONING,
    preamble: str | None = None,
    temperature: float = 0.2,
    seed: int | None = None,
) -> VoteRecord:
    """One agent evaluates all candidates and casts its vote.

    The vote prompt rides on top of the agent's history so the persona
    carries over, but the exchange is not persisted into the history.
    Raises UnparseableVote after MAX_VOTE_ATTEMPTS failed parses.
    """
    registry = list(candidates.keys())
    if agent.id not in registry:
        raise ValueError(f"candidates missing entry for voter {agent.id.name}")
    prompt = template.format(candidates=candidate_block(candidates))
    if preamble:
        prompt = f"{preamble}\n\n{prompt}"
    messages = [*agent.history, user(prompt)]
    params = gateway.params_for(role, temperature=temperature, seed=seed)

    attempts: list[str] = []
    started = time.perf_counter()
    for _ in range(MAX_VOTE_ATTEMPTS):
        reply = gateway.chat(
            role,
            messages,
            params,
            tags={"stage": "ballot", "emotion": agent.id.name},
        )
        attempts.append(reply.content)
        vote = parse_vote(reply.content, agent.id, registry)
        if vote is not None:
            latency_ms = (time.perf_counter() - started) * 1000.0
            return VoteRecord(agent.id, vote, prompt, attempts, latency_ms)
    raise UnparseableVote(agent.id.name, attempts)


def run_ballot(
    agents: Sequence[EmotionAgent],
    candidates: dict[EmotionId, str],
    *,
    gateway: Gateway,
    template: str,
    role: BackendRole = BackendRole.REASONING,
    preamble: str | None = None,
    temperature: float = 0.2,
    seed: int | None = None,
    on_record: Callable[[VoteRecord], None] | None = None,
) -> tuple[list[VoteRecord], BallotResult]:
    """All agents vote (concurrently); abstentions excluded from the tally."""

    def one(agent: EmotionAgent) -> VoteRecord:
        try:
            record = cast_vote(
                agent,
                candidates,
                gateway=gateway,
                template=template,
                role=role,
                preamble=preamble,
                temperature=temperature,
                seed=seed,
            )
        except UnparseableVote as exc:
            logger.warning("%s abstained: no parseable vote", agent.id.name)
            record = VoteRecord(agent.id, None, "", exc.attempts, 0.0)
        if on_record is not None:
            on_record(record)
        return record

    with ThreadPoolExecutor(max_workers=len(agents)) as pool:
        records = list(pool.map(one, agents))
    votes = [r.vote for r in records if r.vote is not None]
    return records, tally(votes, [a.id for a in agents])


def tally(
    votes: Sequence[Vote], registry: Sequence[EmotionId]
) -> BallotResult:
    """Plurality outcome: unique maximum wins, otherwise all leaders tie.

    Zero cast votes is degenerate: the outcome collapses to a tie over the
    entire registry (logged) so synthesis can still proceed.
    """
    counts: dict[EmotionId, int] = {e: 0 for e in registry}
    for vote in votes:
        if vote.choice not in counts:
            raise ValueError(f"vote for unregistered emotion {vote.choice.name!r}")
        counts[vote.choice] += 1
    if not votes:
        logger.warning("degenerate ballot: zero cast votes, tie over registry")
        return BallotResult(
            votes=(), tally=counts, outcome=Tie(frozenset(registry))
        )
    top = max(counts.values())
    leaders = [e for e in registry if counts[e] == top]
    outcome: Winner | Tie
    if len(leaders) == 1:
        outcome = Winner(leaders[0])
    else:
        outcome = Tie(frozenset(leaders))
    return BallotResult(votes=tuple(votes), tally=counts, outcome=outcome)
