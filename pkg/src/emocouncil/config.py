"""Application configuration: defaults, YAML file loading, overrides.

The config path comes from an explicit argument, the EMOCOUNCIL_CONFIG
environment variable, or falls back to built-in defaults. File values are
merged section by section over the defaults.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from . import defaults
from .errors import ConfigError

ENV_CONFIG_PATH = "EMOCOUNCIL_CONFIG"


@dataclass(frozen=True)
class BackendSettings:
    mode: str = "mock"  # "live" | "mock"
    base_url: str = "http://localhost:11434"
    text_model: str = defaults.DEFAULT_TEXT_MODEL
    vision_model: str = defaults.DEFAULT_VISION_MODEL
    reasoning_model: str = defaults.DEFAULT_REASONING_MODEL
    embed_model: str = defaults.DEFAULT_EMBED_MODEL
    embed_dimension: int | None = None  # locked to first vector when unset
    agent_temperature: float = defaults.DEFAULT_AGENT_TEMPERATURE
    adjudication_temperature: float = defaults.DEFAULT_ADJUDICATION_TEMPERATURE
    seed: int | None = None
    timeout_s: float = 120.0


@dataclass(frozen=True)
class DebateSettings:
    round1_template: str = defaults.ROUND1_TEMPLATE
    round2_template: str = defaults.ROUND2_TEMPLATE
    round3_template: str = defaults.ROUND3_TEMPLATE


@dataclass(frozen=True)
class BallotSettings:
    vote_template: str = defaults.VOTE_TEMPLATE


@dataclass(frozen=True)
class SynthesisSettings:
    winner_template: str = defaults.WINNER_TEMPLATE
    tie_template: str = defaults.TIE_TEMPLATE
    armando_preamble: str = defaults.ARMANDO_PREAMBLE


@dataclass(frozen=True)
class RagSettings:
    k: int = 4
    max_chunk_chars: int = 1500
    corpus_dir: str | None = None
    index_path: str | None = None
    context_template: str = defaults.CONTEXT_UPDATE_TEMPLATE


@dataclass(frozen=True)
class ServerSettings:
    host: str = "127.0.0.1"
    port: int = 8420
    transcripts_dir: str = "transcripts"


@dataclass(frozen=True)
class AppConfig:
    backend: BackendSettings = field(default_factory=BackendSettings)
    debate: DebateSettings = field(default_factory=DebateSettings)
    ballot: BallotSettings = field(default_factory=BallotSettings)
    synthesis: SynthesisSettings = field(default_factory=SynthesisSettings)
    rag: RagSettings = field(default_factory=RagSettings)
    server: ServerSettings = field(default_factory=ServerSettings)
    emotions: tuple[str, ...] = tuple(defaults.DEFAULT_EMOTIONS)
    personas: dict[str, str] = field(
        default_factory=lambda: dict(defaults.DEFAULT_PERSONAS)
    )

    def with_overrides(self, overrides: dict | None) -> "AppConfig":
        """New config with ``overrides`` (config-file shaped dict) applied."""
        if not overrides:
            return self
        return _merge(self, overrides)


_SECTIONS = {
    "backend": BackendSettings,
    "debate": DebateSettings,
    "ballot": BallotSettings,
    "synthesis": SynthesisSettings,
    "rag": RagSettings,
    "server": ServerSettings,
}


def _merge(config: AppConfig, data: dict) -> AppConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    updates: dict = {}
    for key, value in data.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be a mapping")
            section = getattr(config, key)
            unknown = set(value) - set(section.__dataclass_fields__)
            if unknown:
                raise ConfigError(f"unknown keys in {key!r}: {sorted(unknown)}")
            updates[key] = replace(section, **value)
        elif key == "emotions":
            updates["emotions"] = tuple(str(v) for v in value)
        elif key == "personas":
            personas = dict(config.personas)
            personas.update({str(k): str(v) for k, v in value.items()})
            updates["personas"] = personas
        else:
            raise ConfigError(f"unknown config key: {key!r}")
    return replace(config, **updates)


def load_config(path: str | os.PathLike | None = None) -> AppConfig:
    """Defaults merged with the YAML file at ``path`` (or $EMOCOUNCIL_CONFIG)."""
    config = AppConfig()
    resolved = path or os.environ.get(ENV_CONFIG_PATH)
    if not resolved:
        return config
    file_path = Path(resolved)
    if not file_path.exists():
        raise ConfigError(f"config file not found: {file_path}")
    try:
        data = yaml.safe_load(file_path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {file_path}: {exc}") from exc
    return _merge(config, data or {})
