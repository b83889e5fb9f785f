"""Exception taxonomy shared across the package."""

from __future__ import annotations


class EmoCouncilError(Exception):
    """Base class for all package errors."""


class ConfigError(EmoCouncilError):
    """Configuration file or override is invalid."""


class TransportError(EmoCouncilError):
    """Backend unreachable or unresponsive (connection refused, timeout).

    ``timeout`` distinguishes timeouts, which the gateway retries once,
    from hard connection failures, which it does not.
    """

    def __init__(self, message: str, *, timeout: bool = False):
        super().__init__(message)
        self.timeout = timeout


class ModelNotFound(EmoCouncilError):
    """Configured model is absent on the backend. Fatal; names the model."""

    def __init__(self, model: str):
        super().__init__(f"model not found on backend: {model!r}")
        self.model = model


class EmptyCompletion(EmoCouncilError):
    """Backend returned empty content."""


class InvalidImage(EmoCouncilError):
    """Image bytes do not decode as PNG or JPEG."""


class DimensionMismatch(EmoCouncilError):
    """Embedding vector length differs from the configured/index dimension."""


class ZeroVector(EmoCouncilError):
    """Cosine similarity is undefined for an all-zero vector."""


class MissingPersona(EmoCouncilError):
    """A registered emotion has no persona template."""

    def __init__(self, emotion_name: str):
        super().__init__(f"no persona template for emotion {emotion_name!r}")
        self.emotion_name = emotion_name


class DebateError(EmoCouncilError):
    """A round failed; tagged with the emotion whose call failed."""

    def __init__(self, emotion_name: str, round_no: int, cause: Exception):
        super().__init__(
            f"round {round_no} failed for {emotion_name}: {cause}"
        )
        self.emotion_name = emotion_name
        self.round_no = round_no
        self.cause = cause


class UnparseableVote(EmoCouncilError):
    """Vote response could not be parsed after the allowed attempts."""

    def __init__(self, voter_name: str, attempts: list[str]):
        super().__init__(
            f"{voter_name} produced no parseable vote in {len(attempts)} attempts"
        )
        self.voter_name = voter_name
        self.attempts = attempts


class MissingFinalAnswer(EmoCouncilError):
    """Raw synthesis output has no FINAL ANSWER header."""


class MalformedSynthesis(EmoCouncilError):
    """Synthesis output unparseable after retry; carries the raw output."""

    def __init__(self, raw: str):
        super().__init__("synthesis output missing FINAL ANSWER after retry")
        self.raw = raw


class EmptyIndex(EmoCouncilError):
    """Retrieval requested against an index with no chunks."""


class EmbeddingFailure(EmoCouncilError):
    """Embedding a document chunk failed; the ingest was rolled back."""


class SnapshotFormatError(EmoCouncilError):
    """Index snapshot file is corrupt or has an unsupported version."""


class UnknownSession(EmoCouncilError):
    """No session with the given id."""

    def __init__(self, session_id: str):
        super().__init__(f"unknown session: {session_id}")
        self.session_id = session_id


class SessionBusy(EmoCouncilError):
    """An ask is already in flight on this session."""
