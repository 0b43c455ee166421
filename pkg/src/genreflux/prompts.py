"""Prompt synthesis: where the spatial and affective streams converge.

A generation prompt is assembled as

    character anchor, composition directive, scene fragment, style fragments...

with exact duplicate phrases removed (first occurrence wins).  The anchor is
always the prefix so the protagonist's identity survives every genre shift;
the active genre's modifier lands last so it flavours rather than dominates
the subject.  Negative prompts combine standing quality guards with the
modifier's suppression phrases.
"""

from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import dataclass
from pathlib import Path

from .affect import GENRE_ORDER, Genre
from .errors import DataFileError, MissingGenre
from .spatial import CompositionClass, ControlImage

#: Standing negative-prompt guards applied to every request.
DEFAULT_BASE_NEGATIVE = ("deformed hands", "extra limbs", "text artifacts")


@dataclass(frozen=True)
class StyleModifier:
    """Genre-keyed prompt fragments injected once the genre goes active."""

    genre: Genre
    positive_fragments: tuple[str, ...]
    negative_fragments: tuple[str, ...]

    def __post_init__(self):
        if not self.positive_fragments or not self.negative_fragments:
            raise DataFileError(f"{self.genre.value} modifier needs fragments on both sides")
        overlap = set(self.positive_fragments) & set(self.negative_fragments)
        if overlap:
            raise DataFileError(
                f"{self.genre.value} modifier lists {sorted(overlap)} as both positive and negative"
            )


@dataclass(frozen=True)
class StyleRegistry:
    """All four genre modifiers plus composition directives and base negatives."""

    modifiers: dict[Genre, StyleModifier]
    composition: dict[CompositionClass, str]
    base_negative: tuple[str, ...] = DEFAULT_BASE_NEGATIVE

    def __post_init__(self):
        missing = [g.value for g in GENRE_ORDER if g not in self.modifiers]
        if missing:
            raise DataFileError(f"style registry is missing genres: {missing}")
        for comp in CompositionClass:
            if comp not in self.composition or not self.composition[comp].strip():
                raise DataFileError(f"style registry is missing a {comp.value} directive")

    @classmethod
    def from_file(cls, path: str | Path) -> "StyleRegistry":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataFileError(f"cannot read style registry {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise DataFileError(f"style registry {path} must hold a JSON object")
        modifiers: dict[Genre, StyleModifier] = {}
        for genre in GENRE_ORDER:
            block = raw.get(genre.value)
            if block is None:
                continue
            try:
                modifiers[genre] = StyleModifier(
                    genre=genre,
                    positive_fragments=tuple(str(p) for p in block["positive"]),
                    negative_fragments=tuple(str(p) for p in block["negative"]),
                )
            except (TypeError, KeyError) as exc:
                raise DataFileError(f"invalid modifier for {genre.value} in {path}: {exc}") from exc
        composition = {
            CompositionClass(name): str(fragment)
            for name, fragment in raw.get("composition", {}).items()
        }
        base_negative = tuple(str(p) for p in raw.get("base_negative", DEFAULT_BASE_NEGATIVE))
        return cls(modifiers=modifiers, composition=composition, base_negative=base_negative)


def style_modifier_for(genre: Genre, registry: StyleRegistry) -> StyleModifier:
    """The genre's modifier; load-time validation makes a miss unreachable in practice."""
    modifier = registry.modifiers.get(genre)
    if modifier is None:
        raise MissingGenre(f"style registry has no modifier for {genre.value}")
    return modifier


@dataclass(frozen=True)
class CharacterAnchor:
    """Fixed protagonist description prepended to every request of a session."""

    description: str

    def __post_init__(self):
        if not self.description.strip():
            raise ValueError("anchor description must be non-empty")
        if "\n" in self.description:
            raise ValueError("anchor description must not contain newlines")


@dataclass(frozen=True)
class GenerationRequest:
    """Fully synthesized request handed to the image backend."""

    prompt: str
    negative_prompt: str
    width: int
    height: int
    seed: int
    panel_index: int
    control_image: ControlImage | None = None

    def __post_init__(self):
        if self.width % 64 or self.height % 64:
            raise ValueError(f"dimensions must be multiples of 64, got {self.width}x{self.height}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit an unsigned 64-bit integer")
        if self.panel_index < 1:
            raise ValueError(f"panel_index must be >= 1, got {self.panel_index}")

    def canonical_dict(self) -> dict:
        control = None
        if self.control_image is not None:
            control = hashlib.sha256(
                self.control_image.pixels
                + f":{self.control_image.width}x{self.control_image.height}".encode()
            ).hexdigest()
        return {
            "prompt": self.prompt,
            "negative_prompt": self.negative_prompt,
            "width": self.width,
            "height": self.height,
            "seed": self.seed,
            "panel_index": self.panel_index,
            "control_image": control,
        }

    def digest(self) -> str:
        payload = json.dumps(
            self.canonical_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # splitmix64 finalizer: cheap, well-mixed, identical on every platform
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def panel_seed(session_id: uuid.UUID | str, panel_index: int, regeneration_counter: int) -> int:
    """Deterministic 64-bit seed per (session, panel, regeneration).

    Replays of a session reproduce images exactly; bumping the regeneration
    counter rerolls just that panel.
    """
    sid = session_id if isinstance(session_id, uuid.UUID) else uuid.UUID(str(session_id))
    mixed = _splitmix64((sid.int & _MASK64) ^ (sid.int >> 64))
    mixed = _splitmix64(mixed ^ (panel_index & _MASK64))
    return _splitmix64(mixed ^ (regeneration_counter & _MASK64))


def _dedup_after(kept: list[str], candidates: list[str]) -> list[str]:
    seen = set(kept)
    out = list(kept)
    for phrase in candidates:
        if phrase and phrase not in seen:
            seen.add(phrase)
            out.append(phrase)
    return out


@dataclass(frozen=True)
class SynthesisInputs:
    """Everything ``synthesize`` needs besides the seed coordinates."""

    anchor: CharacterAnchor
    directive: str
    scene_fragment: str
    active: StyleModifier | None = None
    base_negative: tuple[str, ...] = DEFAULT_BASE_NEGATIVE
    control_image: ControlImage | None = None
    width: int = 512
    height: int = 512


def synthesize(
    inputs: SynthesisInputs,
    session_id: uuid.UUID | str,
    panel_index: int,
    regeneration_counter: int = 0,
) -> GenerationRequest:
    """Assemble the prompt pair and seed for one panel generation.

    Pure function.  The anchor is kept verbatim as the prompt prefix; later
    phrases duplicating an earlier one (including anchor phrases) are emitted
    once, in first-occurrence order.  A phrase landing on both sides of the
    prompt pair means the vocabulary or registry drifted and is an error.
    """
    anchor_phrases = inputs.anchor.description.split(", ")
    candidates = [inputs.directive, inputs.scene_fragment]
    if inputs.active is not None:
        candidates += list(inputs.active.positive_fragments)
    positive = _dedup_after(anchor_phrases, candidates)

    negative = list(inputs.base_negative)
    if inputs.active is not None:
        negative += list(inputs.active.negative_fragments)
    negative = _dedup_after([], negative)

    clash = set(positive) & set(negative)
    if clash:
        raise ValueError(f"phrases appear in both prompt and negative prompt: {sorted(clash)}")

    prompt_text = ", ".join(positive)
    if inputs.active is not None:
        # a suppressed phrase sneaking into the prompt means the registry or
        # vocabulary drifted; substring check because prompts are free text
        for phrase in inputs.active.negative_fragments:
            if phrase in prompt_text:
                raise ValueError(
                    f"modifier negative fragment {phrase!r} occurs inside the prompt"
                )

    return GenerationRequest(
        prompt=prompt_text,
        negative_prompt=", ".join(negative),
        width=inputs.width,
        height=inputs.height,
        seed=panel_seed(session_id, panel_index, regeneration_counter),
        panel_index=panel_index,
        control_image=inputs.control_image,
    )
