"""Ollama-compatible wire protocol: canonical codec plus the live backend.

Requests and responses are encoded as canonical JSON (sorted keys, compact
separators, UTF-8) so recorded wire fixtures round-trip through the codec
byte for byte. The live backend speaks POST /api/chat (non-streamed) and
POST /api/embed.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from typing import Sequence

import requests

from .errors import ModelNotFound, TransportError
from .gateway import ChatMessage, GenerationParams

DEFAULT_TIMEOUT_S = 120.0


def _canonical(obj) -> bytes:
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def encode_chat_request(
    model: str, messages: Sequence[ChatMessage], params: GenerationParams
) -> bytes:
    options: dict = {"temperature": params.temperature}
    if params.seed is not None:
        options["seed"] = params.seed
    if params.max_tokens is not None:
        options["num_predict"] = params.max_tokens
    body = {
        "model": model,
        "messages": [_encode_message(m) for m in messages],
        "stream": False,
        "options": options,
    }
    return _canonical(body)


def _encode_message(message: ChatMessage) -> dict:
    encoded: dict = {"role": message.role, "content": message.content}
    if message.images:
        encoded["images"] = [
            base64.b64encode(img).decode("ascii") for img in message.images
        ]
    return encoded


def parse_chat_request(
    raw: bytes,
) -> tuple[str, list[ChatMessage], GenerationParams]:
    body = json.loads(raw)
    messages = [
        ChatMessage(
            role=m["role"],
            content=m.get("content", ""),
            images=tuple(
                base64.b64decode(img) for img in m.get("images", [])
            ),
        )
        for m in body["messages"]
    ]
    options = body.get("options", {})
    params = GenerationParams(
        model=body["model"],
        temperature=options.get("temperature", 0.8),
        seed=options.get("seed"),
        max_tokens=options.get("num_predict"),
    )
    return body["model"], messages, params


@dataclass(frozen=True)
class OllamaChatResponse:
    model: str
    created_at: str
    content: str
    done: bool = True
    done_reason: str = "stop"
    total_duration: int = 0
    eval_count: int = 0


def encode_chat_response(resp: OllamaChatResponse) -> bytes:
    return _canonical(
        {
            "model": resp.model,
            "created_at": resp.created_at,
            "message": {"role": "assistant", "content": resp.content},
            "done": resp.done,
            "done_reason": resp.done_reason,
            "total_duration": resp.total_duration,
            "eval_count": resp.eval_count,
        }
    )


def parse_chat_response(raw: bytes) -> OllamaChatResponse:
    body = json.loads(raw)
    _raise_on_error(body)
    return OllamaChatResponse(
        model=body.get("model", ""),
        created_at=body.get("created_at", ""),
        content=body.get("message", {}).get("content", ""),
        done=body.get("done", True),
        done_reason=body.get("done_reason", "stop"),
        total_duration=body.get("total_duration", 0),
        eval_count=body.get("eval_count", 0),
    )


def encode_embed_request(model: str, text: str) -> bytes:
    return _canonical({"model": model, "input": text})


def parse_embed_request(raw: bytes) -> tuple[str, str]:
    body = json.loads(raw)
    return body["model"], body["input"]


def encode_embed_response(model: str, values: Sequence[float]) -> bytes:
    return _canonical({"model": model, "embeddings": [list(values)]})


def parse_embed_response(raw: bytes) -> list[float]:
    body = json.loads(raw)
    _raise_on_error(body)
    embeddings = body.get("embeddings")
    if not embeddings:
        raise TransportError("embed response carries no embeddings")
    return [float(v) for v in embeddings[0]]


def _raise_on_error(body: dict) -> None:
    error = body.get("error")
    if not error:
        return
    if "not found" in error:
        # e.g. 'model "gemma3:4b" not found, try pulling it first'
        for quote in ('"', "'"):
            if quote in error:
                name = error.split(quote)[1]
                raise ModelNotFound(name)
        raise ModelNotFound(error)
    raise TransportError(f"backend error: {error}")


class OllamaBackend:
    """Live HTTP backend for an Ollama-compatible server."""

    def __init__(
        self,
        base_url: str,
        *,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s
        self._session = session or requests.Session()

    def chat(
        self, model: str, messages: Sequence[ChatMessage], params: GenerationParams
    ) -> str:
        raw = self._post(
            "/api/chat", encode_chat_request(model, messages, params)
        )
        return parse_chat_response(raw).content

    def embed(self, model: str, text: str) -> list[float]:
        raw = self._post("/api/embed", encode_embed_request(model, text))
        return parse_embed_response(raw)

    def _post(self, path: str, body: bytes) -> bytes:
        url = f"{self.base_url}{path}"
        try:
            response = self._session.post(
                url,
                data=body,
                headers={"Content-Type": "application/json"},
                timeout=self.timeout_s,
            )
        except requests.exceptions.Timeout as exc:
            raise TransportError(f"timeout talking to {url}", timeout=True) from exc
        except requests.exceptions.RequestException as exc:
            raise TransportError(f"cannot reach {url}: {exc}") from exc
        if response.status_code >= 400:
            try:
                _raise_on_error(response.json())
            except ValueError:
                pass
            raise TransportError(
                f"{url} returned HTTP {response.status_code}"
            )
        return response.content
