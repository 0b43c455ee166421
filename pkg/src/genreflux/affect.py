"""Genre flux dynamics: the accumulator that turns keyword/emoji picks into drift.

Every panel turn injects a pair of weight vectors (one from the keyword, one
from the emoji) into a four-dimensional emotional score over
{Romance, Tragedy, Chaos, Mystery}.  The running state decays geometrically
and the injection is amplified by a rarity multiplier, so rare keyword picks
act like intentional narrative pivots:

    state[t] = state[t-1] * decay + (keyword_weights + emoji_weights) * rarity

When one dimension strictly dominates the others *and* exceeds the flux
threshold, that genre becomes active and stays active until another genre
displaces it the same way.  Everything in this module is a pure function of
its inputs; values are immutable once constructed.
"""

from __future__ import annotations

import json
import math
import unicodedata
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Iterable

import regex as _regex

from .errors import (
    DataFileError,
    DegenerateVocabulary,
    UnknownEmoji,
    UnknownKeyword,
)

if TYPE_CHECKING:  # only for annotations; store imports this module at runtime
    from .store import PanelEvent


class Genre(str, Enum):
    ROMANCE = "Romance"
    TRAGEDY = "Tragedy"
    CHAOS = "Chaos"
    MYSTERY = "Mystery"


#: Canonical component order, fixed for serialization and radar axes.
GENRE_ORDER: tuple[Genre, ...] = (Genre.ROMANCE, Genre.TRAGEDY, Genre.CHAOS, Genre.MYSTERY)


@dataclass(frozen=True)
class EmotionVector:
    """Non-negative scores over (romance, tragedy, chaos, mystery)."""

    romance: float = 0.0
    tragedy: float = 0.0
    chaos: float = 0.0
    mystery: float = 0.0

    def __post_init__(self):
        for name, value in self.as_dict().items():
            if not math.isfinite(value):
                raise ValueError(f"{name} component must be finite, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} component must be >= 0, got {value!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.romance, self.tragedy, self.chaos, self.mystery)

    def as_dict(self) -> dict[str, float]:
        return {
            "romance": self.romance,
            "tragedy": self.tragedy,
            "chaos": self.chaos,
            "mystery": self.mystery,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EmotionVector":
        extra = set(data) - {"romance", "tragedy", "chaos", "mystery"}
        if extra:
            raise ValueError(f"unexpected emotion components: {sorted(extra)}")
        return cls(
            romance=float(data.get("romance", 0.0)),
            tragedy=float(data.get("tragedy", 0.0)),
            chaos=float(data.get("chaos", 0.0)),
            mystery=float(data.get("mystery", 0.0)),
        )

    def component(self, genre: Genre) -> float:
        return self.as_tuple()[GENRE_ORDER.index(genre)]

    def scale(self, factor: float) -> "EmotionVector":
        return EmotionVector(
            self.romance * factor,
            self.tragedy * factor,
            self.chaos * factor,
            self.mystery * factor,
        )

    def max_component(self) -> float:
        return max(self.as_tuple())

    def argmax(self) -> Genre:
        """First genre (canonical order) attaining the maximum component."""
        values = self.as_tuple()
        return GENRE_ORDER[values.index(max(values))]


ZERO_VECTOR = EmotionVector()


@dataclass(frozen=True)
class FluxConfig:
    """Tuning knobs for the accumulator dynamics.

    ``decay`` keeps narrative continuity (1.0 = nothing fades); the flux
    threshold is the dominance cutoff a component must exceed to activate a
    genre.  The rarity multiplier range is fixed at [1.0, 3.0].
    """

    decay: float = 0.8
    flux_threshold: float = 2.5
    beta_min: float = 1.0
    beta_max: float = 3.0

    def __post_init__(self):
        if not (0.0 < self.decay <= 1.0):
            raise ValueError(f"decay must be in (0, 1], got {self.decay}")
        if not (self.flux_threshold > 0):
            raise ValueError(f"flux_threshold must be > 0, got {self.flux_threshold}")
        if self.beta_min > self.beta_max:
            raise ValueError("beta_min must be <= beta_max")

    @classmethod
    def from_dict(cls, data: dict) -> "FluxConfig":
        known = {k: v for k, v in data.items() if k in ("decay", "flux_threshold")}
        return cls(**known)

    @classmethod
    def from_file(cls, path: str | Path) -> "FluxConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataFileError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise DataFileError(f"config file {path} must hold a JSON object")
        try:
            return cls.from_dict(data)
        except (TypeError, ValueError) as exc:
            raise DataFileError(f"invalid config in {path}: {exc}") from exc


def _is_single_grapheme(text: str) -> bool:
    return len(_regex.findall(r"\X", text)) == 1


def _validate_weights(weights: EmotionVector, owner: str) -> None:
    if weights.max_component() > 1.0:
        raise DataFileError(
            f"{owner}: weight components must be <= 1.0 so the config alone "
            f"governs the dynamics (got max {weights.max_component()})"
        )


@dataclass(frozen=True)
class EmojiLexicon:
    """Emoji grapheme cluster -> contribution weights."""

    entries: dict[str, EmotionVector]

    def __post_init__(self):
        for key, weights in self.entries.items():
            if not key or not _is_single_grapheme(key):
                raise DataFileError(f"lexicon key must be one grapheme cluster: {key!r}")
            _validate_weights(weights, f"lexicon entry {key!r}")

    @classmethod
    def from_file(cls, path: str | Path) -> "EmojiLexicon":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataFileError(f"cannot read lexicon file {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise DataFileError(f"lexicon file {path} must hold a JSON object")
        entries: dict[str, EmotionVector] = {}
        for key, value in raw.items():
            normalized = unicodedata.normalize("NFC", key)
            if normalized in entries:
                raise DataFileError(f"duplicate lexicon key after NFC: {normalized!r}")
            try:
                entries[normalized] = EmotionVector.from_dict(value)
            except (TypeError, ValueError) as exc:
                raise DataFileError(f"invalid weights for lexicon key {key!r}: {exc}") from exc
        return cls(entries)


@dataclass(frozen=True)
class VocabEntry:
    weights: EmotionVector
    frequency: int
    scene_fragment: str


@dataclass(frozen=True)
class KeywordVocabulary:
    """Keyword -> (weights, corpus frequency, scene prompt fragment).

    Keys are stored as given but looked up case-insensitively; ``_by_lower``
    is the lookup index built at construction.
    """

    entries: dict[str, VocabEntry]
    _by_lower: dict[str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_lower: dict[str, str] = {}
        for key, entry in self.entries.items():
            if not key.strip():
                raise DataFileError("vocabulary keys must be non-empty")
            lowered = key.lower()
            if lowered in by_lower:
                raise DataFileError(
                    f"vocabulary keys collide case-insensitively: {by_lower[lowered]!r} / {key!r}"
                )
            by_lower[lowered] = key
            _validate_weights(entry.weights, f"vocabulary entry {key!r}")
            if entry.frequency < 0:
                raise DataFileError(f"vocabulary entry {key!r}: frequency must be >= 0")
            if not entry.scene_fragment.strip():
                raise DataFileError(f"vocabulary entry {key!r}: scene_fragment must be non-empty")
        object.__setattr__(self, "_by_lower", by_lower)

    def resolve(self, keyword: str) -> VocabEntry:
        canonical = self._by_lower.get(keyword.lower())
        if canonical is None:
            raise UnknownKeyword(keyword)
        return self.entries[canonical]

    def max_frequency(self) -> int:
        return max((e.frequency for e in self.entries.values()), default=0)

    @classmethod
    def from_file(cls, path: str | Path) -> "KeywordVocabulary":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataFileError(f"cannot read vocabulary file {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise DataFileError(f"vocabulary file {path} must hold a JSON object")
        entries: dict[str, VocabEntry] = {}
        for key, value in raw.items():
            try:
                entries[key] = VocabEntry(
                    weights=EmotionVector.from_dict(value["weights"]),
                    frequency=int(value["frequency"]),
                    scene_fragment=str(value["scene_fragment"]),
                )
            except (TypeError, KeyError, ValueError) as exc:
                raise DataFileError(f"invalid vocabulary entry {key!r}: {exc}") from exc
        return cls(entries)


def lookup_emoji(emoji: str, lexicon: EmojiLexicon) -> EmotionVector:
    """Weights for one emoji; unknown emoji is a hard error, never a zero vector."""
    weights = lexicon.entries.get(unicodedata.normalize("NFC", emoji))
    if weights is None:
        raise UnknownEmoji(emoji)
    return weights


def lookup_keyword(keyword: str, vocab: KeywordVocabulary) -> tuple[EmotionVector, str]:
    """Weights and scene fragment for a keyword (case-insensitive)."""
    entry = vocab.resolve(keyword)
    return entry.weights, entry.scene_fragment


def rarity_multiplier(keyword: str, vocab: KeywordVocabulary, config: FluxConfig) -> float:
    """Amplification for rare keyword picks, linear in normalized frequency.

    The most frequent keyword maps to ``beta_min``, a zero-frequency keyword to
    ``beta_max``.  If every frequency is zero the vocabulary is degenerate:
    a warning is emitted and every keyword gets ``beta_max``.
    """
    entry = vocab.resolve(keyword)
    f_max = vocab.max_frequency()
    if f_max == 0:
        warnings.warn(
            "all vocabulary frequencies are zero; rarity multiplier pinned to maximum",
            DegenerateVocabulary,
            stacklevel=2,
        )
        return config.beta_max
    span = config.beta_max - config.beta_min
    beta = config.beta_min + span * (1.0 - entry.frequency / f_max)
    return min(config.beta_max, max(config.beta_min, beta))


def update_state(
    prev: EmotionVector,
    w_kw: EmotionVector,
    w_emoji: EmotionVector,
    beta: float,
    config: FluxConfig,
) -> EmotionVector:
    """One accumulator step: prev * decay + (w_kw + w_emoji) * beta, per component."""
    if not (config.beta_min <= beta <= config.beta_max):
        raise ValueError(f"beta {beta} outside [{config.beta_min}, {config.beta_max}]")
    d = config.decay
    return EmotionVector(
        prev.romance * d + (w_kw.romance + w_emoji.romance) * beta,
        prev.tragedy * d + (w_kw.tragedy + w_emoji.tragedy) * beta,
        prev.chaos * d + (w_kw.chaos + w_emoji.chaos) * beta,
        prev.mystery * d + (w_kw.mystery + w_emoji.mystery) * beta,
    )


def detect_flux(
    state: EmotionVector,
    previous_active: Genre | None,
    config: FluxConfig,
) -> Genre | None:
    """Dominance rule with hysteresis.

    A genre activates only when its component exceeds the flux threshold AND is
    the strict unique maximum of the vector.  Ties at the maximum and
    sub-threshold states leave the previously active genre in place; once
    active, a genre persists until another genre displaces it.
    """
    values = state.as_tuple()
    peak = max(values)
    if peak <= config.flux_threshold:
        return previous_active
    if values.count(peak) != 1:
        return previous_active
    return GENRE_ORDER[values.index(peak)]


@dataclass(frozen=True)
class TurnRecord:
    """One point of the trajectory: the state after a turn and the genre then active."""

    turn_index: int
    state: EmotionVector
    active_genre: Genre | None


@dataclass(frozen=True)
class NarrativeState:
    """Per-session trajectory; entry 0 of ``history`` is the initial zero state."""

    current: EmotionVector
    turn_index: int
    active_genre: Genre | None
    history: tuple[TurnRecord, ...]

    def __post_init__(self):
        if len(self.history) != self.turn_index + 1:
            raise ValueError(
                f"history length {len(self.history)} != turn_index {self.turn_index} + 1"
            )

    @classmethod
    def initial(cls) -> "NarrativeState":
        return cls(
            current=ZERO_VECTOR,
            turn_index=0,
            active_genre=None,
            history=(TurnRecord(0, ZERO_VECTOR, None),),
        )

    def record_at(self, turn_index: int) -> TurnRecord:
        if not (0 <= turn_index < len(self.history)):
            raise IndexError(f"no turn {turn_index} in a {self.turn_index}-turn session")
        return self.history[turn_index]


def step(
    state: NarrativeState,
    keyword: str,
    emoji: str,
    lexicon: EmojiLexicon,
    vocab: KeywordVocabulary,
    config: FluxConfig,
) -> NarrativeState:
    """Apply one panel turn's injection and re-evaluate the active genre."""
    w_kw, _ = lookup_keyword(keyword, vocab)
    w_emoji = lookup_emoji(emoji, lexicon)
    beta = rarity_multiplier(keyword, vocab, config)
    current = update_state(state.current, w_kw, w_emoji, beta, config)
    active = detect_flux(current, state.active_genre, config)
    turn = state.turn_index + 1
    return NarrativeState(
        current=current,
        turn_index=turn,
        active_genre=active,
        history=state.history + (TurnRecord(turn, current, active),),
    )


def replay(
    events: Iterable["PanelEvent"],
    lexicon: EmojiLexicon,
    vocab: KeywordVocabulary,
    config: FluxConfig,
) -> NarrativeState:
    """Fold ``step`` over an event log from the initial zero state.

    Regeneration events (counter > 0) are state-neutral and skipped; lookup
    errors are re-raised annotated with the offending turn index.  This is the
    equivalence oracle for persistence recovery.
    """
    state = NarrativeState.initial()
    for event in events:
        if event.regeneration_counter > 0:
            continue
        try:
            state = step(state, event.keyword, event.emoji, lexicon, vocab, config)
        except UnknownKeyword as exc:
            raise UnknownKeyword(exc.keyword, turn_index=event.turn_index) from exc
        except UnknownEmoji as exc:
            raise UnknownEmoji(exc.emoji, turn_index=event.turn_index) from exc
    return state
