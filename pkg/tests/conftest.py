"""Shared fixtures: offline gateway, fixture corpus, tiny images."""

from __future__ import annotations

import base64
from pathlib import Path

import pytest

from emocouncil.config import AppConfig
from emocouncil.gateway import BackendRole, Gateway
from emocouncil.mockbackend import MockBackend
from emocouncil.session import SessionManager

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS_DIR = FIXTURES / "corpus"
WIRE_DIR = FIXTURES / "wire"

# 1x1 black PNG
PNG_1X1 = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAIAAACQd1PeAAAADElEQVR4nGNgYGAAAAAEAAH2"
    "FzhVAAAAAElFTkSuQmCC"
)

MOCK_MODELS = {
    BackendRole.TEXT: "mock-text",
    BackendRole.VISION: "mock-vision",
    BackendRole.REASONING: "mock-reasoning",
    BackendRole.EMBEDDING: "mock-embed",
}


def make_gateway(backend: MockBackend | None = None) -> Gateway:
    backend = backend or MockBackend()
    return Gateway(backend, MOCK_MODELS, embed_dimension=backend.embed_dimension)


@pytest.fixture
def mock_backend() -> MockBackend:
    return MockBackend()


@pytest.fixture
def gateway(mock_backend) -> Gateway:
    return make_gateway(mock_backend)


@pytest.fixture
def manager() -> SessionManager:
    return SessionManager(AppConfig())


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS_DIR
