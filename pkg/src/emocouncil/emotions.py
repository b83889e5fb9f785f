"""Emotion personas and their isolated conversation histories.

Each agent owns one history whose first message is its persona system
prompt; no message object is ever shared between agents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import MissingPersona
from .gateway import ChatMessage, system, user


@dataclass(frozen=True)
class EmotionId:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class UserTurn:
    question: str
    context: str | None = None
    image_description: str | None = None

    def __post_init__(self):
        if not self.question:
            raise ValueError("question must be non-empty")


@dataclass
class EmotionAgent:
    """One persona with its own, never-shrinking conversation history."""

    id: EmotionId
    persona_prompt: str
    history: list[ChatMessage] = field(default_factory=list)

    def __post_init__(self):
        if not self.history:
            self.history.append(system(self.persona_prompt))

    def append(self, message: ChatMessage) -> None:
        self.history.append(message)


def make_registry(names: Iterable[str]) -> tuple[EmotionId, ...]:
    """Registry from emotion names; unique case-insensitively, non-empty."""
    registry = tuple(EmotionId(str(n)) for n in names)
    if not registry:
        raise ValueError("emotion registry must be non-empty")
    lowered = [e.name.lower() for e in registry]
    if len(set(lowered)) != len(lowered):
        raise ValueError("emotion names must be unique (case-insensitive)")
    return registry


def resolve(registry: Sequence[EmotionId], name: str) -> EmotionId | None:
    """Registry entry matching ``name`` case-insensitively, if any."""
    wanted = name.strip().lower()
    for emotion in registry:
        if emotion.name.lower() == wanted:
            return emotion
    return None


def init_agents(
    registry: Sequence[EmotionId], persona_templates: Mapping[str, str]
) -> list[EmotionAgent]:
    """One fresh agent per registered emotion.

    Persona templates are keyed by emotion name (matched case-insensitively).
    Raises MissingPersona for a registry entry without a template.
    """
    lowered = {key.lower(): value for key, value in persona_templates.items()}
    agents = []
    for emotion in registry:
        template = lowered.get(emotion.name.lower())
        if template is None:
            raise MissingPersona(emotion.name)
        agents.append(EmotionAgent(id=emotion, persona_prompt=template))
    return agents


def render_turn(turn: UserTurn) -> str:
    """User-turn text with optional CONTEXT: and IMAGE: sections."""
    parts = [turn.question]
    if turn.context:
        parts.append(f"CONTEXT: {turn.context}")
    if turn.image_description:
        parts.append(f"IMAGE: {turn.image_description}")
    return "\n\n".join(parts)


def inject_user_turn(agents: Sequence[EmotionAgent], turn: UserTurn) -> None:
    """Append the rendered turn to every agent's history, one message each."""
    if not agents:
        raise ValueError("no agents initialized")
    text = render_turn(turn)
    for agent in agents:
        agent.append(user(text))
