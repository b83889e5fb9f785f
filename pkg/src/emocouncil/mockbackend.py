"""Deterministic offline backend.

Every reply is a pure function of the request, built from FNV-1a digests,
so tests can assert exact outputs and verify that prompt content actually
reached the backend. Replies to plain prompts look like

    MOCK[<marker>]:<fnv1a-64 hex of the concatenated message contents>

where ``<marker>`` is the lowercased emotion tag found on an ``EMOTION:``
line of the system message, or ``joy-less`` when there is none. Prompts
carrying the vote, context-update, or segmented-answer instruction
sentinels get structurally valid replies so the downstream parsers can
run end to end.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .gateway import ChatMessage, GenerationParams
from .hashing import HashEmbedder, fnv1a_64, fnv1a_64_hex

FALLBACK_MARKER = "joy-less"

VOTE_SENTINEL = "VOTE: <EmotionName>"
CONTEXT_SENTINEL = "TOPICS:"
SEGMENTS_SENTINEL = "FINAL ANSWER:"
THOUGHTS_SENTINEL = "THOUGHTS:"

_EMOTION_TAG_RE = re.compile(r"^EMOTION:\s*(\S+)", re.MULTILINE)


@dataclass(frozen=True)
class MockCall:
    """Captured request, for prompt-inspection tests."""

    model: str
    messages: tuple[ChatMessage, ...]
    params: GenerationParams


class MockBackend:
    """Offline stand-in for both the chat and embedding backends."""

    def __init__(self, embed_dimension: int = 256):
        self.calls: list[MockCall] = []
        self._embedder = HashEmbedder(embed_dimension)

    @property
    def embed_dimension(self) -> int:
        return self._embedder.dimension

    def chat(
        self, model: str, messages: Sequence[ChatMessage], params: GenerationParams
    ) -> str:
        self.calls.append(MockCall(model, tuple(messages), params))
        image_bytes = b"".join(img for m in messages for img in m.images)
        if image_bytes:
            return f"MOCK-IMG:{fnv1a_64(image_bytes):016x}"

        digest = fnv1a_64_hex("".join(m.content for m in messages))
        marker = self._marker(messages)
        stamp = f"MOCK[{marker}]:{digest}"

        prompt = messages[-1].content
        if VOTE_SENTINEL in prompt:
            return f"VOTE: {marker.title()}\nJUSTIFICATION: {stamp}"
        if CONTEXT_SENTINEL in prompt:
            return f"TOPICS: mock-topic-{digest[:8]}\nSUMMARY: {stamp}"
        if SEGMENTS_SENTINEL in prompt:
            lines = [f"REASONING: {stamp}"]
            if THOUGHTS_SENTINEL in prompt:
                lines.append(f"THOUGHTS: {stamp}")
            lines.append(f"FINAL ANSWER: {stamp}")
            return "\n".join(lines)
        return stamp

    def embed(self, model: str, text: str) -> list[float]:
        return self._embedder.embed(text)

    @staticmethod
    def _marker(messages: Sequence[ChatMessage]) -> str:
        for m in messages:
            if m.role == "system":
                match = _EMOTION_TAG_RE.search(m.content)
                if match:
                    return match.group(1).lower()
                break
        return FALLBACK_MARKER
