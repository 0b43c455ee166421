"""Event-sourced session persistence.

Each session is a directory:

    {root}/{session_id}/meta.json                      anchor, config, canvas
    {root}/{session_id}/events.jsonl                   one PanelEvent per line
    {root}/{session_id}/images/{turn:02}_{counter:02}.png

The log is append-only and fsynced before an append is acknowledged, so an
acknowledged turn survives a crash.  Recovery replays the log through the
affect accumulator; a torn trailing line (partial write) is truncated with a
warning, garbage anywhere else refuses the session.
"""

from __future__ import annotations

import io
import json
import logging
import os
import re
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image

from . import affect
from .affect import EmojiLexicon, FluxConfig, KeywordVocabulary, NarrativeState
from .backend import PanelImage
from .errors import CorruptLog, NoPanels, OutOfOrderEvent, UnknownSession
from .prompts import CharacterAnchor
from .spatial import PanelBox, SketchStrokes

log = logging.getLogger(__name__)

_IMAGE_NAME = re.compile(r"^(\d{2,})_(\d{2,})\.png$")


@dataclass(frozen=True)
class PanelEvent:
    """One user turn, the unit of replay.

    New panels carry ``regeneration_counter`` 0 and a turn index one past the
    previous panel; a regeneration reuses an existing turn index with the
    counter incremented.  ``request_digest``/``backend_id`` record the lineage
    of the image generated for this event.
    """

    turn_index: int
    box: PanelBox
    strokes: SketchStrokes
    keyword: str
    emoji: str
    timestamp_ms: int
    regeneration_counter: int = 0
    request_digest: str | None = None
    backend_id: str | None = None

    def __post_init__(self):
        if self.turn_index < 1:
            raise ValueError(f"turn_index must be >= 1, got {self.turn_index}")
        if self.regeneration_counter < 0:
            raise ValueError("regeneration_counter must be >= 0")

    def as_dict(self) -> dict:
        return {
            "turn_index": self.turn_index,
            "box": self.box.as_dict(),
            "strokes": self.strokes.as_dict(),
            "keyword": self.keyword,
            "emoji": self.emoji,
            "timestamp_ms": self.timestamp_ms,
            "regeneration_counter": self.regeneration_counter,
            "request_digest": self.request_digest,
            "backend_id": self.backend_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PanelEvent":
        return cls(
            turn_index=int(data["turn_index"]),
            box=PanelBox.from_dict(data["box"]),
            strokes=SketchStrokes.from_dict(data["strokes"]),
            keyword=str(data["keyword"]),
            emoji=str(data["emoji"]),
            timestamp_ms=int(data["timestamp_ms"]),
            regeneration_counter=int(data.get("regeneration_counter", 0)),
            request_digest=data.get("request_digest"),
            backend_id=data.get("backend_id"),
        )


@dataclass(frozen=True)
class SessionMeta:
    session_id: uuid.UUID
    anchor: CharacterAnchor
    config: FluxConfig
    canvas_width: int
    canvas_height: int
    created_at_ms: int

    def as_dict(self) -> dict:
        return {
            "session_id": str(self.session_id),
            "anchor": self.anchor.description,
            "config": {
                "decay": self.config.decay,
                "flux_threshold": self.config.flux_threshold,
            },
            "canvas": {"width": self.canvas_width, "height": self.canvas_height},
            "created_at_ms": self.created_at_ms,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SessionMeta":
        return cls(
            session_id=uuid.UUID(data["session_id"]),
            anchor=CharacterAnchor(data["anchor"]),
            config=FluxConfig.from_dict(data["config"]),
            canvas_width=int(data["canvas"]["width"]),
            canvas_height=int(data["canvas"]["height"]),
            created_at_ms=int(data["created_at_ms"]),
        )


@dataclass
class SessionRecord:
    """A fully recovered session: meta, log, replayed state, latest images."""

    meta: SessionMeta
    events: tuple[PanelEvent, ...]
    state: NarrativeState
    images: dict[int, PanelImage] = field(default_factory=dict)


class _LogTail:
    """Validation state for appends: last new-panel turn and per-turn counters."""

    def __init__(self):
        self.last_turn = 0
        self.counters: dict[int, int] = {}

    def admit(self, event: PanelEvent) -> None:
        if event.regeneration_counter == 0:
            if event.turn_index != self.last_turn + 1:
                raise OutOfOrderEvent(
                    f"new panel turn {event.turn_index} does not follow turn {self.last_turn}"
                )
            self.last_turn = event.turn_index
            self.counters[event.turn_index] = 0
        else:
            current = self.counters.get(event.turn_index)
            if current is None:
                raise OutOfOrderEvent(
                    f"regeneration for unknown turn {event.turn_index}"
                )
            if event.regeneration_counter != current + 1:
                raise OutOfOrderEvent(
                    f"regeneration counter {event.regeneration_counter} for turn "
                    f"{event.turn_index} does not follow counter {current}"
                )
            self.counters[event.turn_index] = event.regeneration_counter


class SessionStore:
    """Filesystem store; one logical writer per session (enforced upstream)."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._tails: dict[uuid.UUID, _LogTail] = {}

    # -- paths ------------------------------------------------------------

    def session_dir(self, session_id: uuid.UUID) -> Path:
        return self.root / str(session_id)

    def _events_path(self, session_id: uuid.UUID) -> Path:
        return self.session_dir(session_id) / "events.jsonl"

    def image_path(self, session_id: uuid.UUID, turn: int, counter: int) -> Path:
        return self.session_dir(session_id) / "images" / f"{turn:02d}_{counter:02d}.png"

    def session_exists(self, session_id: uuid.UUID) -> bool:
        return (self.session_dir(session_id) / "meta.json").is_file()

    def list_sessions(self) -> list[uuid.UUID]:
        found = []
        for entry in self.root.iterdir():
            try:
                sid = uuid.UUID(entry.name)
            except ValueError:
                continue
            if self.session_exists(sid):
                found.append(sid)
        return sorted(found, key=str)

    # -- writes -----------------------------------------------------------

    def create_session(self, meta: SessionMeta) -> None:
        directory = self.session_dir(meta.session_id)
        if directory.exists():
            raise FileExistsError(f"session directory already exists: {directory}")
        (directory / "images").mkdir(parents=True)
        (directory / "meta.json").write_text(
            json.dumps(meta.as_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        self._events_path(meta.session_id).touch()
        self._tails[meta.session_id] = _LogTail()

    def append_event(self, session_id: uuid.UUID, event: PanelEvent) -> None:
        """Durably append one event; raises before touching the log on bad order."""
        if not self.session_exists(session_id):
            raise UnknownSession(str(session_id))
        tail = self._tail(session_id)
        tail.admit(event)
        line = json.dumps(event.as_dict(), ensure_ascii=False, sort_keys=True)
        with open(self._events_path(session_id), "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def save_image(self, session_id: uuid.UUID, turn: int, counter: int, image: PanelImage) -> Path:
        path = self.image_path(session_id, turn, counter)
        path.parent.mkdir(exist_ok=True)
        path.write_bytes(image.png_bytes)
        return path

    # -- reads ------------------------------------------------------------

    def _tail(self, session_id: uuid.UUID) -> _LogTail:
        tail = self._tails.get(session_id)
        if tail is None:
            tail = _LogTail()
            for event in self._read_events(session_id):
                tail.admit(event)
            self._tails[session_id] = tail
        return tail

    def _read_events(self, session_id: uuid.UUID) -> list[PanelEvent]:
        path = self._events_path(session_id)
        if not path.exists():
            raise UnknownSession(str(session_id))
        raw = path.read_bytes()
        lines = raw.split(b"\n")
        if lines and lines[-1] == b"":
            lines.pop()
        events: list[PanelEvent] = []
        for lineno, line in enumerate(lines):
            try:
                data = json.loads(line.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                if lineno == len(lines) - 1:
                    # torn write at the very end: drop it and repair the file
                    log.warning("truncating torn trailing line in %s (%s)", path, exc)
                    keep = b"\n".join(lines[:-1]) + (b"\n" if lines[:-1] else b"")
                    path.write_bytes(keep)
                    break
                raise CorruptLog(f"{path}: undecodable line {lineno + 1}: {exc}") from exc
            try:
                events.append(PanelEvent.from_dict(data))
            except (ValueError, KeyError, TypeError) as exc:
                raise CorruptLog(f"{path}: invalid event on line {lineno + 1}: {exc}") from exc
        return events

    def read_events(self, session_id: uuid.UUID) -> list[PanelEvent]:
        """All events in append order, after torn-tail repair."""
        return self._read_events(session_id)

    def read_meta(self, session_id: uuid.UUID) -> SessionMeta:
        path = self.session_dir(session_id) / "meta.json"
        if not path.is_file():
            raise UnknownSession(str(session_id))
        return SessionMeta.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def latest_images(self, session_id: uuid.UUID) -> dict[int, tuple[int, Path]]:
        """turn -> (latest counter, path) for every panel that has a PNG on disk."""
        images_dir = self.session_dir(session_id) / "images"
        latest: dict[int, tuple[int, Path]] = {}
        if not images_dir.is_dir():
            return latest
        for path in images_dir.iterdir():
            match = _IMAGE_NAME.match(path.name)
            if not match:
                continue
            turn, counter = int(match.group(1)), int(match.group(2))
            if turn not in latest or counter > latest[turn][0]:
                latest[turn] = (counter, path)
        return latest

    def load_session(
        self,
        session_id: uuid.UUID,
        lexicon: EmojiLexicon,
        vocab: KeywordVocabulary,
    ) -> SessionRecord:
        """Recover a session: replay the log and pick up the latest panel images."""
        meta = self.read_meta(session_id)
        events = tuple(self._read_events(session_id))
        state = affect.replay(events, lexicon, vocab, meta.config)

        digests = {
            (e.turn_index, e.regeneration_counter): (e.request_digest, e.backend_id)
            for e in events
        }
        images: dict[int, PanelImage] = {}
        for turn, (counter, path) in self.latest_images(session_id).items():
            png = path.read_bytes()
            with Image.open(io.BytesIO(png)) as img:
                width, height = img.size
            digest, backend_id = digests.get((turn, counter), (None, None))
            images[turn] = PanelImage(
                width=width,
                height=height,
                png_bytes=png,
                backend_id=backend_id or "unknown",
                request_digest=digest or "",
            )
        return SessionRecord(meta=meta, events=events, state=state, images=images)

    # -- export -----------------------------------------------------------

    def export_comic(
        self,
        session_id: uuid.UUID,
        output_dir: str | Path,
        lexicon: EmojiLexicon,
        vocab: KeywordVocabulary,
    ) -> dict:
        """Write panel_{turn:02}.png (latest regeneration each) plus manifest.json.

        The manifest is deterministic: everything in it comes from the log,
        never from export time.  Returns the manifest.
        """
        record = self.load_session(session_id, lexicon, vocab)
        if not record.images:
            raise NoPanels(f"session {session_id} has no generated panels")

        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)

        new_panel_events = {
            e.turn_index: e for e in record.events if e.regeneration_counter == 0
        }
        regen_counts = {
            turn: max(
                (e.regeneration_counter for e in record.events if e.turn_index == turn),
                default=0,
            )
            for turn in new_panel_events
        }

        panels = []
        for turn in sorted(record.images):
            event = new_panel_events.get(turn)
            if event is None or turn > record.state.turn_index:
                log.warning("skipping orphan image for turn %d (no matching event)", turn)
                continue
            filename = f"panel_{turn:02d}.png"
            (out / filename).write_bytes(record.images[turn].png_bytes)
            turn_record = record.state.record_at(turn)
            previous = record.state.record_at(turn - 1)
            panels.append(
                {
                    "turn_index": turn,
                    "image": filename,
                    "keyword": event.keyword,
                    "emoji": event.emoji,
                    "timestamp_ms": event.timestamp_ms,
                    "state": turn_record.state.as_dict(),
                    "active_genre": turn_record.active_genre.value
                    if turn_record.active_genre
                    else None,
                    "flux_triggered": turn_record.active_genre != previous.active_genre,
                    "regenerations": regen_counts.get(turn, 0),
                }
            )

        if not panels:
            raise NoPanels(f"session {session_id} has no exportable panels")

        manifest = {
            "session_id": str(session_id),
            "anchor": record.meta.anchor.description,
            "config": {
                "decay": record.meta.config.decay,
                "flux_threshold": record.meta.config.flux_threshold,
            },
            "panels": panels,
        }
        (out / "manifest.json").write_text(
            json.dumps(manifest, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return manifest
