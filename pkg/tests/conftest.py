import uuid

import pytest

from genreflux import (
    EmojiLexicon,
    EmotionVector,
    FluxConfig,
    KeywordVocabulary,
    MockBackend,
    PanelBox,
    SessionManager,
    SessionStore,
    SketchStrokes,
)
from genreflux.affect import VocabEntry


@pytest.fixture
def config() -> FluxConfig:
    return FluxConfig()


@pytest.fixture
def unit_tragedy_lexicon() -> EmojiLexicon:
    # 💧 contributes exactly one unit of tragedy; 😐 contributes nothing
    return EmojiLexicon(
        {
            "💧": EmotionVector(tragedy=1.0),
            "😐": EmotionVector(),
        }
    )


@pytest.fixture
def unit_tragedy_vocab() -> KeywordVocabulary:
    # "Echo" carries no weight and sits at f_max, so beta is exactly 1.0
    return KeywordVocabulary(
        {
            "Echo": VocabEntry(EmotionVector(), 10, "an echo lingers"),
            "Void": VocabEntry(EmotionVector(), 0, "empty space stretches out"),
        }
    )


@pytest.fixture
def canvas_box() -> PanelBox:
    return PanelBox(0, 0, 1600, 600)


@pytest.fixture
def simple_strokes() -> SketchStrokes:
    return SketchStrokes(polylines=(((100.0, 100.0), (900.0, 400.0)),), stroke_width=3)


@pytest.fixture
def manager(tmp_path) -> SessionManager:
    return SessionManager(SessionStore(tmp_path / "sessions"))


@pytest.fixture
def session(manager) -> tuple[SessionManager, uuid.UUID]:
    meta = manager.create_session("young woman, silver bob haircut")
    return manager, meta.session_id


class FailingBackend:
    """Fault-injection stand-in: always raises like an unreachable server."""

    backend_id = "failing"

    def __init__(self):
        self.calls = 0

    def generate(self, request):
        from genreflux.errors import BackendUnreachable

        self.calls += 1
        raise BackendUnreachable("injected fault")


class FlakyBackend:
    """Fails the first n calls, then delegates to the mock."""

    backend_id = "flaky"

    def __init__(self, failures: int):
        self.remaining = failures
        self.inner = MockBackend()

    def generate(self, request):
        from genreflux.errors import BackendUnreachable

        if self.remaining > 0:
            self.remaining -= 1
            raise BackendUnreachable("injected fault")
        return self.inner.generate(request)
