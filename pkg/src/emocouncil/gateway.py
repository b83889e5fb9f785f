"""Uniform gateway over text, vision, reasoning, and embedding backends.

One configured model per role; every successful operation appends exactly
one record to the gateway's call log. Timeouts and empty completions are
retried once, then surfaced.
"""

from __future__ import annotations

import io
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Mapping, Protocol, Sequence

from PIL import Image, UnidentifiedImageError

from .errors import (
    DimensionMismatch,
    EmptyCompletion,
    InvalidImage,
    TransportError,
)

MAX_IMAGE_BYTES = 20 * 1024 * 1024


class BackendRole(str, Enum):
    TEXT = "text"
    VISION = "vision"
    REASONING = "reasoning"
    EMBEDDING = "embedding"


CHAT_ROLES = (BackendRole.TEXT, BackendRole.REASONING, BackendRole.VISION)


@dataclass(frozen=True)
class ChatMessage:
    """One conversation message; images ride only on user messages."""

    role: str  # "system" | "user" | "assistant"
    content: str
    images: tuple[bytes, ...] = ()

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"invalid message role: {self.role!r}")
        if not self.content and not self.images:
            raise ValueError("message needs content or at least one image")
        if self.images and self.role != "user":
            raise ValueError("images are permitted only on user messages")
        for img in self.images:
            if len(img) > MAX_IMAGE_BYTES:
                raise ValueError("image exceeds the 20 MiB limit")


def system(content: str) -> ChatMessage:
    return ChatMessage("system", content)


def user(content: str, images: Sequence[bytes] = ()) -> ChatMessage:
    return ChatMessage("user", content, tuple(images))


def assistant(content: str) -> ChatMessage:
    return ChatMessage("assistant", content)


@dataclass(frozen=True)
class GenerationParams:
    model: str
    temperature: float = 0.8
    seed: int | None = None
    max_tokens: int | None = None

    def __post_init__(self):
        if not self.model:
            raise ValueError("model identifier must be non-empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")
        if self.max_tokens is not None and self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "temperature": self.temperature,
            "seed": self.seed,
            "max_tokens": self.max_tokens,
        }


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.values)


class Backend(Protocol):
    """What the gateway needs from any model backend."""

    def chat(
        self, model: str, messages: Sequence[ChatMessage], params: GenerationParams
    ) -> str: ...

    def embed(self, model: str, text: str) -> list[float]: ...


@dataclass
class CallRecord:
    """One logged backend call: parameters, payload shape, and latency."""

    op: str
    role: str
    model: str
    params: dict
    messages: list[dict]
    response: str
    latency_ms: float
    timestamp: str
    tags: dict = field(default_factory=dict)


def _snapshot_messages(messages: Sequence[ChatMessage]) -> list[dict]:
    return [
        {"role": m.role, "content": m.content, "image_count": len(m.images)}
        for m in messages
    ]


class Gateway:
    """Routes calls to the configured model for each role and logs them.

    Shareable across threads: calls are stateless, the call log append is
    lock-protected.
    """

    def __init__(
        self,
        backend: Backend,
        models: Mapping[BackendRole, str],
        *,
        embed_dimension: int | None = None,
        default_temperature: float = 0.8,
    ):
        missing = [r for r in BackendRole if r not in models]
        if missing:
            raise ValueError(f"no model configured for roles: {missing}")
        self._backend = backend
        self._models = dict(models)
        self._embed_dimension = embed_dimension
        self._default_temperature = default_temperature
        self.call_log: list[CallRecord] = []
        self._log_lock = threading.Lock()

    @property
    def backend(self) -> Backend:
        return self._backend

    def model_for(self, role: BackendRole) -> str:
        return self._models[role]

    def params_for(
        self,
        role: BackendRole,
        *,
        temperature: float | None = None,
        seed: int | None = None,
        max_tokens: int | None = None,
    ) -> GenerationParams:
        return GenerationParams(
            model=self._models[role],
            temperature=(
                self._default_temperature if temperature is None else temperature
            ),
            seed=seed,
            max_tokens=max_tokens,
        )

    def chat(
        self,
        role: BackendRole,
        messages: Sequence[ChatMessage],
        params: GenerationParams | None = None,
        *,
        tags: dict | None = None,
    ) -> ChatMessage:
        """Single non-streamed completion; returns the assistant message."""
        if role not in CHAT_ROLES:
            raise ValueError(f"chat is not available for role {role.value!r}")
        if not messages:
            raise ValueError("messages must be non-empty")
        params = params or self.params_for(role)
        content, latency_ms = self._call_chat(params.model, messages, params)
        self._record(
            "chat", role, params, _snapshot_messages(messages), content,
            latency_ms, tags,
        )
        return assistant(content)

    def describe_image(
        self,
        image: bytes,
        instruction: str,
        params: GenerationParams | None = None,
        *,
        tags: dict | None = None,
    ) -> str:
        """Prose description of one PNG/JPEG image via the vision model."""
        if not instruction:
            raise ValueError("instruction must be non-empty")
        _validate_image(image)
        params = params or self.params_for(BackendRole.VISION)
        messages = [user(instruction, images=[image])]
        content, latency_ms = self._call_chat(params.model, messages, params)
        self._record(
            "describe_image", BackendRole.VISION, params,
            _snapshot_messages(messages), content, latency_ms, tags,
        )
        return content

    def embed(self, text: str, *, tags: dict | None = None) -> EmbeddingVector:
        """Embedding of one text; dimension is locked to the first result."""
        if not text.strip():
            raise ValueError("cannot embed text that is empty after trimming")
        model = self._models[BackendRole.EMBEDDING]
        start = time.perf_counter()
        values = self._with_retry(lambda: self._backend.embed(model, text))
        latency_ms = (time.perf_counter() - start) * 1000.0
        if self._embed_dimension is None:
            self._embed_dimension = len(values)
        elif len(values) != self._embed_dimension:
            raise DimensionMismatch(
                f"backend returned {len(values)} values, expected "
                f"{self._embed_dimension}"
            )
        self._record(
            "embed", BackendRole.EMBEDDING,
            GenerationParams(model=model, temperature=0.0),
            [{"role": "user", "content": text, "image_count": 0}],
            f"<{len(values)}-d vector>", latency_ms, tags,
        )
        return EmbeddingVector(tuple(values))

    @property
    def embed_dimension(self) -> int | None:
        return self._embed_dimension

    def _call_chat(
        self,
        model: str,
        messages: Sequence[ChatMessage],
        params: GenerationParams,
    ) -> tuple[str, float]:
        def attempt() -> str:
            content = self._backend.chat(model, messages, params)
            if not content:
                raise EmptyCompletion(f"{model} returned empty content")
            return content

        start = time.perf_counter()
        content = self._with_retry(attempt)
        return content, (time.perf_counter() - start) * 1000.0

    @staticmethod
    def _with_retry(attempt):
        # one automatic retry on timeout or empty completion, then surface
        try:
            return attempt()
        except EmptyCompletion:
            return attempt()
        except TransportError as exc:
            if not exc.timeout:
                raise
            return attempt()

    def _record(self, op, role, params, messages, response, latency_ms, tags):
        record = CallRecord(
            op=op,
            role=role.value,
            model=params.model,
            params=params.as_dict(),
            messages=messages,
            response=response,
            latency_ms=latency_ms,
            timestamp=datetime.now(timezone.utc).isoformat(),
            tags=dict(tags or {}),
        )
        with self._log_lock:
            self.call_log.append(record)


def _validate_image(image: bytes) -> None:
    if not image:
        raise InvalidImage("empty image payload")
    if len(image) > MAX_IMAGE_BYTES:
        raise InvalidImage("image exceeds the 20 MiB limit")
    try:
        with Image.open(io.BytesIO(image)) as im:
            fmt = im.format
            im.verify()  # raises SyntaxError/OSError on corrupt data
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        raise InvalidImage(f"undecodable image bytes: {exc}") from exc
    if fmt not in ("PNG", "JPEG"):
        raise InvalidImage(f"unsupported image format: {fmt}")
