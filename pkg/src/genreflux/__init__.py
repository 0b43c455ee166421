"""genreflux: a co-creative comic engine with genre-flux affect tracking.

Two input streams per panel turn — a spatial one (panel box + sketch) and an
affective one (keyword + emoji) — converge into a synthesized generation
request.  Affect accumulates across turns with decay; when one genre's
component dominates past a threshold, a style modifier flips the visual
language of every following panel.
"""

from .affect import (
    EmojiLexicon,
    EmotionVector,
    FluxConfig,
    Genre,
    GENRE_ORDER,
    KeywordVocabulary,
    NarrativeState,
    TurnRecord,
    ZERO_VECTOR,
    detect_flux,
    lookup_emoji,
    lookup_keyword,
    rarity_multiplier,
    replay,
    step,
    update_state,
)
from .backend import (
    BackendConfig,
    BackendKind,
    HttpBackend,
    MockBackend,
    PanelImage,
    make_backend,
    mock_generate,
)
from .engine import SessionManager, TurnResult
from .service import create_app
from .errors import (
    BackendError,
    BackendRejected,
    BackendUnreachable,
    CorruptLog,
    DataFileError,
    DegenerateVocabulary,
    DimensionMismatch,
    FluxError,
    MissingGenre,
    NoPanels,
    OutOfOrderEvent,
    StoreError,
    UnknownEmoji,
    UnknownKeyword,
    UnknownSession,
)
from .prompts import (
    CharacterAnchor,
    GenerationRequest,
    StyleModifier,
    StyleRegistry,
    SynthesisInputs,
    panel_seed,
    style_modifier_for,
    synthesize,
)
from .spatial import (
    CompositionClass,
    ControlImage,
    PanelBox,
    SketchStrokes,
    classify_aspect,
    composition_directive,
    rasterize_sketch,
    snap_resolution,
)
from .store import PanelEvent, SessionMeta, SessionRecord, SessionStore

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "BackendError",
    "BackendKind",
    "BackendRejected",
    "BackendUnreachable",
    "CharacterAnchor",
    "CompositionClass",
    "ControlImage",
    "CorruptLog",
    "DataFileError",
    "DegenerateVocabulary",
    "DimensionMismatch",
    "EmojiLexicon",
    "EmotionVector",
    "FluxConfig",
    "FluxError",
    "GENRE_ORDER",
    "GenerationRequest",
    "Genre",
    "HttpBackend",
    "KeywordVocabulary",
    "MissingGenre",
    "MockBackend",
    "NarrativeState",
    "NoPanels",
    "OutOfOrderEvent",
    "PanelBox",
    "PanelEvent",
    "PanelImage",
    "SessionManager",
    "SessionMeta",
    "SessionRecord",
    "SessionStore",
    "SketchStrokes",
    "StoreError",
    "StyleModifier",
    "StyleRegistry",
    "SynthesisInputs",
    "TurnRecord",
    "TurnResult",
    "UnknownEmoji",
    "UnknownKeyword",
    "UnknownSession",
    "ZERO_VECTOR",
    "classify_aspect",
    "composition_directive",
    "create_app",
    "detect_flux",
    "lookup_emoji",
    "lookup_keyword",
    "make_backend",
    "mock_generate",
    "panel_seed",
    "rarity_multiplier",
    "rasterize_sketch",
    "replay",
    "snap_resolution",
    "step",
    "style_modifier_for",
    "synthesize",
    "update_state",
]
