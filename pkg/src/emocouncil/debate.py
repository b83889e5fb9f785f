"""Four-round debate among the emotion agents.

Round 0: independent initial answers. Rounds 1-2: each agent reviews the
other emotions' previous-round outputs (never its own, which already sits
in its history) and refines its perspective. Round 3: each agent reassesses
the original question verbatim and delivers its final candidate answer.

Within a round the agent calls run concurrently; a barrier separates
rounds, so no round r+1 call starts before every round r call finished.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .config import DebateSettings
from .emotions import EmotionAgent, EmotionId, UserTurn, inject_user_turn
from .errors import DebateError
from .gateway import BackendRole, ChatMessage, Gateway, user

ROUND_COUNT = 4


@dataclass(frozen=True)
class RoundOutputs:
    round: int
    outputs: dict[EmotionId, str]

    def __post_init__(self):
        if not 0 <= self.round < ROUND_COUNT:
            raise ValueError(f"round must be in 0..{ROUND_COUNT - 1}")


@dataclass
class DebateTranscript:
    query: str
    rounds: list[RoundOutputs] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return len(self.rounds) == ROUND_COUNT

    @property
    def candidates(self) -> dict[EmotionId, str]:
        """Round-3 outputs; exactly what the ballot receives."""
        if not self.complete:
            raise ValueError("transcript incomplete; no candidates yet")
        return self.rounds[-1].outputs


class DebateObserver(Protocol):
    """Hooks for progress logging; all optional no-ops by default."""

    def round_started(self, round_no: int) -> None: ...

    def agent_answered(
        self,
        emotion: EmotionId,
        round_no: int,
        messages: Sequence[ChatMessage],
        response: str,
        latency_ms: float,
        params: dict,
    ) -> None: ...


class _NullObserver:
    def round_started(self, round_no):
        pass

    def agent_answered(self, emotion, round_no, messages, response, latency_ms, params):
        pass


def peer_block(outputs: dict[EmotionId, str], exclude: EmotionId) -> str:
    """Peer outputs as "Name: text" blocks, excluding the agent's own.

    Sorted by emotion name so prompts do not depend on agent scheduling
    order.
    """
    return "\n\n".join(
        f"{e.name}: {outputs[e]}"
        for e in sorted(outputs, key=lambda e: e.name)
        if e != exclude
    )


class DebateEngine:
    def __init__(
        self,
        gateway: Gateway,
        settings: DebateSettings,
        *,
        temperature: float = 0.8,
        seed: int | None = None,
        observer: DebateObserver | None = None,
    ):
        self._gateway = gateway
        self._settings = settings
        self._temperature = temperature
        self._seed = seed
        self._observer = observer or _NullObserver()

    def run_debate(
        self, agents: Sequence[EmotionAgent], turn: UserTurn
    ) -> DebateTranscript:
        """Inject the turn, run rounds 0-3 with barriers, return the transcript."""
        inject_user_turn(agents, turn)
        transcript = DebateTranscript(query=turn.question)
        transcript.rounds.append(self.run_round0(agents))
        transcript.rounds.append(self.run_round1(agents, transcript.rounds[0]))
        transcript.rounds.append(self.run_round2(agents, transcript.rounds[1]))
        transcript.rounds.append(self.run_round3(agents, turn.question))
        return transcript

    def run_round0(self, agents: Sequence[EmotionAgent]) -> RoundOutputs:
        """Initial answers: each agent replies from its own history alone."""
        for agent in agents:
            if agent.history[-1].role != "user":
                raise ValueError("user turn must be injected before round 0")
        return self._run_round(agents, 0, lambda agent: None)

    def run_round1(
        self, agents: Sequence[EmotionAgent], prior: RoundOutputs
    ) -> RoundOutputs:
        self._check_prior(agents, prior, expected_round=0)
        return self._run_round(
            agents,
            1,
            lambda agent: self._settings.round1_template.format(
                peer_outputs=peer_block(prior.outputs, agent.id)
            ),
        )

    def run_round2(
        self, agents: Sequence[EmotionAgent], prior: RoundOutputs
    ) -> RoundOutputs:
        self._check_prior(agents, prior, expected_round=1)
        return self._run_round(
            agents,
            2,
            lambda agent: self._settings.round2_template.format(
                peer_outputs=peer_block(prior.outputs, agent.id)
            ),
        )

    def run_round3(
        self, agents: Sequence[EmotionAgent], query: str
    ) -> RoundOutputs:
        """Final reassessment of the original query, restated verbatim."""
        for agent in agents:
            answered = sum(1 for m in agent.history if m.role == "assistant")
            if answered < 3:
                raise ValueError(
                    f"{agent.id.name} has not completed rounds 0-2"
                )
        prompt = self._settings.round3_template.format(query=query)
        return self._run_round(agents, 3, lambda agent: prompt)

    @staticmethod
    def _check_prior(agents, prior: RoundOutputs, expected_round: int) -> None:
        if prior.round != expected_round:
            raise ValueError(
                f"expected round-{expected_round} outputs, got round {prior.round}"
            )
        if set(prior.outputs) != {a.id for a in agents}:
            raise ValueError("prior round outputs incomplete for this registry")

    def _run_round(self, agents, round_no: int, build_prompt) -> RoundOutputs:
        self._observer.round_started(round_no)
        with ThreadPoolExecutor(max_workers=len(agents)) as pool:
            futures = [
                pool.submit(self._agent_call, agent, round_no, build_prompt(agent))
                for agent in agents
            ]
            outputs: dict[EmotionId, str] = {}
            for agent, future in zip(agents, futures):
                outputs[agent.id] = future.result()
        return RoundOutputs(round=round_no, outputs=outputs)

    def _agent_call(
        self, agent: EmotionAgent, round_no: int, prompt: str | None
    ) -> str:
        if prompt is not None:
            agent.append(user(prompt))
        sent = list(agent.history)
        params = self._gateway.params_for(
            BackendRole.TEXT, temperature=self._temperature, seed=self._seed
        )
        started = time.perf_counter()
        try:
            reply = self._gateway.chat(
                BackendRole.TEXT,
                sent,
                params,
                tags={"stage": "debate", "round": round_no, "emotion": agent.id.name},
            )
        except Exception as exc:
            raise DebateError(agent.id.name, round_no, exc) from exc
        latency_ms = (time.perf_counter() - started) * 1000.0
        agent.append(reply)
        self._observer.agent_answered(
            agent.id, round_no, sent, reply.content, latency_ms, params.as_dict()
        )
        return reply.content
