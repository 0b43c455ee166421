"""Session orchestration: one place that wires the two streams together.

A turn flows through: keyword/emoji lookup -> accumulator step -> box
classification and sketch rasterization -> prompt synthesis -> backend
generation -> durable append + image write -> in-memory commit.  The turn is
atomic: any failure before the append leaves the session exactly as it was,
so a failed generation never consumes the user's turn.

Each session has a single logical writer (a per-session lock); reads take a
snapshot of the committed state.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass

from . import affect, assets
from .affect import (
    EmojiLexicon,
    FluxConfig,
    KeywordVocabulary,
    NarrativeState,
)
from .backend import MockBackend, PanelImage
from .errors import UnknownSession
from .prompts import (
    CharacterAnchor,
    StyleRegistry,
    SynthesisInputs,
    style_modifier_for,
    synthesize,
)
from .spatial import (
    PanelBox,
    SketchStrokes,
    classify_aspect,
    composition_directive,
    rasterize_sketch,
    snap_resolution,
)
from .store import PanelEvent, SessionMeta, SessionStore

DEFAULT_CANVAS = (1600, 1200)


@dataclass(frozen=True)
class TurnResult:
    """Outcome of one committed turn (new panel or regeneration)."""

    session_id: uuid.UUID
    turn_index: int
    regeneration_counter: int
    state: affect.EmotionVector
    active_genre: affect.Genre | None
    flux_triggered: bool
    image_name: str
    prompt_preview: str
    image: PanelImage


class _LiveSession:
    def __init__(self, meta: SessionMeta, state: NarrativeState):
        self.meta = meta
        self.state = state
        self.lock = threading.Lock()


class SessionManager:
    """Owns the assets, the store and the backend; serializes writes per session."""

    def __init__(
        self,
        store: SessionStore,
        backend=None,
        lexicon: EmojiLexicon | None = None,
        vocab: KeywordVocabulary | None = None,
        styles: StyleRegistry | None = None,
        config: FluxConfig | None = None,
        max_side: int = 512,
    ):
        self.store = store
        self.lexicon = lexicon or assets.default_lexicon()
        self.vocab = vocab or assets.default_vocabulary()
        self.styles = styles or assets.default_styles()
        self.default_config = config or assets.default_config()
        self.backend = backend or MockBackend(self.styles)
        self.max_side = max_side
        self._sessions: dict[uuid.UUID, _LiveSession] = {}
        self._registry_lock = threading.Lock()

    # -- sessions ----------------------------------------------------------

    def create_session(
        self,
        anchor: str,
        config_overrides: dict | None = None,
        canvas: tuple[int, int] = DEFAULT_CANVAS,
        session_id: uuid.UUID | None = None,
        created_at_ms: int | None = None,
    ) -> SessionMeta:
        base = self.default_config
        overrides = config_overrides or {}
        meta = SessionMeta(
            session_id=session_id or uuid.uuid4(),
            anchor=CharacterAnchor(anchor),
            config=FluxConfig(
                decay=float(overrides.get("decay", base.decay)),
                flux_threshold=float(overrides.get("flux_threshold", base.flux_threshold)),
            ),
            canvas_width=int(canvas[0]),
            canvas_height=int(canvas[1]),
            created_at_ms=created_at_ms if created_at_ms is not None else _now_ms(),
        )
        self.store.create_session(meta)
        with self._registry_lock:
            self._sessions[meta.session_id] = _LiveSession(meta, NarrativeState.initial())
        return meta

    def _live(self, session_id: uuid.UUID) -> _LiveSession:
        with self._registry_lock:
            live = self._sessions.get(session_id)
            if live is not None:
                return live
        # not in memory: recover from disk (service restart path)
        if not self.store.session_exists(session_id):
            raise UnknownSession(str(session_id))
        record = self.store.load_session(session_id, self.lexicon, self.vocab)
        with self._registry_lock:
            live = self._sessions.setdefault(
                session_id, _LiveSession(record.meta, record.state)
            )
        return live

    def session_meta(self, session_id: uuid.UUID) -> SessionMeta:
        return self._live(session_id).meta

    def session_state(self, session_id: uuid.UUID) -> NarrativeState:
        return self._live(session_id).state

    # -- turns ---------------------------------------------------------------

    def submit_panel(
        self,
        session_id: uuid.UUID,
        box: PanelBox,
        strokes: SketchStrokes,
        keyword: str,
        emoji: str,
        timestamp_ms: int | None = None,
    ) -> TurnResult:
        live = self._live(session_id)
        with live.lock:
            if not box.fits_canvas(live.meta.canvas_width, live.meta.canvas_height):
                raise ValueError(
                    f"panel box exceeds the {live.meta.canvas_width}x"
                    f"{live.meta.canvas_height} canvas"
                )
            if not strokes.within_box(box):
                raise ValueError("sketch strokes fall outside the panel box")
            config = live.meta.config

            # everything below is computed before anything is persisted
            candidate = affect.step(
                live.state, keyword, emoji, self.lexicon, self.vocab, config
            )
            turn = candidate.turn_index
            request, image_inputs = self._build_request(
                live, box, strokes, keyword, candidate.active_genre, turn, 0
            )
            image = self.backend.generate(request)

            event = PanelEvent(
                turn_index=turn,
                box=box,
                strokes=strokes,
                keyword=keyword,
                emoji=emoji,
                timestamp_ms=timestamp_ms if timestamp_ms is not None else _now_ms(),
                regeneration_counter=0,
                request_digest=image.request_digest,
                backend_id=image.backend_id,
            )
            self.store.append_event(session_id, event)
            self.store.save_image(session_id, turn, 0, image)
            live.state = candidate

            return TurnResult(
                session_id=session_id,
                turn_index=turn,
                regeneration_counter=0,
                state=candidate.current,
                active_genre=candidate.active_genre,
                flux_triggered=candidate.active_genre != candidate.record_at(turn - 1).active_genre,
                image_name=f"{turn:02d}_00.png",
                prompt_preview=request.prompt,
                image=image,
            )

    def regenerate(self, session_id: uuid.UUID, turn: int) -> TurnResult:
        """Reroll one panel's image; the narrative state does not move."""
        live = self._live(session_id)
        with live.lock:
            if not (1 <= turn <= live.state.turn_index):
                raise IndexError(f"no panel turn {turn} in session {session_id}")
            original = self._new_panel_event(session_id, turn)
            counter = self._next_counter(session_id, turn)
            record = live.state.record_at(turn)

            request, _ = self._build_request(
                live,
                original.box,
                original.strokes,
                original.keyword,
                record.active_genre,
                turn,
                counter,
            )
            image = self.backend.generate(request)

            event = PanelEvent(
                turn_index=turn,
                box=original.box,
                strokes=original.strokes,
                keyword=original.keyword,
                emoji=original.emoji,
                timestamp_ms=_now_ms(),
                regeneration_counter=counter,
                request_digest=image.request_digest,
                backend_id=image.backend_id,
            )
            self.store.append_event(session_id, event)
            self.store.save_image(session_id, turn, counter, image)

            return TurnResult(
                session_id=session_id,
                turn_index=turn,
                regeneration_counter=counter,
                state=record.state,
                active_genre=record.active_genre,
                flux_triggered=False,
                image_name=f"{turn:02d}_{counter:02d}.png",
                prompt_preview=request.prompt,
                image=image,
            )

    def _build_request(
        self,
        live: _LiveSession,
        box: PanelBox,
        strokes: SketchStrokes,
        keyword: str,
        active_genre: affect.Genre | None,
        turn: int,
        counter: int,
    ):
        _, scene = affect.lookup_keyword(keyword, self.vocab)
        directive = composition_directive(classify_aspect(box), self.styles.composition)
        width, height = snap_resolution(box, self.max_side)
        control = rasterize_sketch(strokes, box, (width, height))
        modifier = (
            style_modifier_for(active_genre, self.styles) if active_genre is not None else None
        )
        inputs = SynthesisInputs(
            anchor=live.meta.anchor,
            directive=directive,
            scene_fragment=scene,
            active=modifier,
            base_negative=self.styles.base_negative,
            control_image=control,
            width=width,
            height=height,
        )
        request = synthesize(inputs, live.meta.session_id, turn, counter)
        return request, inputs

    def _new_panel_event(self, session_id: uuid.UUID, turn: int) -> PanelEvent:
        for event in self.store.read_events(session_id):
            if event.turn_index == turn and event.regeneration_counter == 0:
                return event
        raise IndexError(f"no logged panel for turn {turn}")

    def _next_counter(self, session_id: uuid.UUID, turn: int) -> int:
        counters = [
            e.regeneration_counter
            for e in self.store.read_events(session_id)
            if e.turn_index == turn
        ]
        return max(counters) + 1

    # -- listings ------------------------------------------------------------

    def vocab_listing(self) -> list[dict]:
        return [
            {
                "keyword": keyword,
                "weights": entry.weights.as_dict(),
                "frequency": entry.frequency,
                "scene_fragment": entry.scene_fragment,
            }
            for keyword, entry in sorted(self.vocab.entries.items())
        ]

    def lexicon_listing(self) -> list[dict]:
        return [
            {"emoji": emoji, "weights": weights.as_dict()}
            for emoji, weights in sorted(self.lexicon.entries.items())
        ]

    def export(self, session_id: uuid.UUID, output_dir) -> dict:
        live = self._live(session_id)
        with live.lock:
            return self.store.export_comic(session_id, output_dir, self.lexicon, self.vocab)


def _now_ms() -> int:
    return int(time.time() * 1000)
