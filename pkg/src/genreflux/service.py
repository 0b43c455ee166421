"""HTTP facade over :class:`~genreflux.engine.SessionManager`.

Route handlers translate wire JSON to domain objects and domain errors to
status codes; all sequencing and atomicity lives in the engine.  Error
mapping: unknown session 404, unknown keyword/emoji or bad geometry 422,
backend failure 502 (the turn is not consumed), export of an empty session
409.
"""

from __future__ import annotations

import io
import tempfile
import uuid
import zipfile
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .engine import DEFAULT_CANVAS, SessionManager, TurnResult
from .errors import (
    BackendError,
    NoPanels,
    UnknownEmoji,
    UnknownKeyword,
    UnknownSession,
)
from .spatial import CLOSEUP_MAX_RATIO, PANORAMIC_MIN_RATIO, PanelBox, SketchStrokes
from .store import _IMAGE_NAME

API_VERSION = "0.1.0"


class BoxModel(BaseModel):
    x: float
    y: float
    width: float
    height: float


class StrokesModel(BaseModel):
    polylines: list[list[tuple[float, float]]] = Field(default_factory=list)
    stroke_width: int = 3


class CreateSessionModel(BaseModel):
    anchor: str
    config: dict[str, float] | None = None
    canvas: tuple[int, int] | None = None


class PanelModel(BaseModel):
    box: BoxModel
    strokes: StrokesModel = Field(default_factory=StrokesModel)
    keyword: str
    emoji: str


def _state_payload(manager: SessionManager, session_id: uuid.UUID) -> dict:
    meta = manager.session_meta(session_id)
    state = manager.session_state(session_id)
    return {
        "session_id": str(session_id),
        "anchor": meta.anchor.description,
        "config": {
            "decay": meta.config.decay,
            "flux_threshold": meta.config.flux_threshold,
        },
        "canvas": [meta.canvas_width, meta.canvas_height],
        "turn_index": state.turn_index,
        "state": state.current.as_dict(),
        "active_genre": state.active_genre.value if state.active_genre else None,
        "history": [
            {
                "turn_index": rec.turn_index,
                "state": rec.state.as_dict(),
                "active_genre": rec.active_genre.value if rec.active_genre else None,
            }
            for rec in state.history
        ],
    }


def _turn_payload(result: TurnResult) -> dict:
    sid = str(result.session_id)
    return {
        "session_id": sid,
        "turn_index": result.turn_index,
        "regeneration_counter": result.regeneration_counter,
        "state": result.state.as_dict(),
        "active_genre": result.active_genre.value if result.active_genre else None,
        "flux_triggered_this_turn": result.flux_triggered,
        "image_name": result.image_name,
        "image": f"/sessions/{sid}/images/{result.image_name}",
        "prompt_preview": result.prompt_preview,
        "backend_id": result.image.backend_id,
        "request_digest": result.image.request_digest,
        "width": result.image.width,
        "height": result.image.height,
    }


def _deterministic_zip(root: Path) -> bytes:
    # fixed entry metadata so identical exports are byte-identical archives
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        for path in sorted(p for p in root.rglob("*") if p.is_file()):
            info = zipfile.ZipInfo(str(path.relative_to(root)), date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o644 << 16
            zf.writestr(info, path.read_bytes())
    return buf.getvalue()


def create_app(manager: SessionManager, ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="genreflux", version=API_VERSION)
    app.state.manager = manager

    @app.exception_handler(UnknownSession)
    async def _unknown_session(request: Request, exc: UnknownSession):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(UnknownKeyword)
    async def _unknown_keyword(request: Request, exc: UnknownKeyword):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(UnknownEmoji)
    async def _unknown_emoji(request: Request, exc: UnknownEmoji):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(BackendError)
    async def _backend_error(request: Request, exc: BackendError):
        return JSONResponse(status_code=502, content={"detail": str(exc)})

    @app.exception_handler(NoPanels)
    async def _no_panels(request: Request, exc: NoPanels):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": API_VERSION}

    @app.get("/config")
    def get_config():
        # aspect cutoffs ride along so clients can mirror the badge logic
        # without hardcoding engine constants
        cfg = manager.default_config
        return {
            "decay": cfg.decay,
            "flux_threshold": cfg.flux_threshold,
            "beta_min": cfg.beta_min,
            "beta_max": cfg.beta_max,
            "max_side": manager.max_side,
            "panoramic_min": PANORAMIC_MIN_RATIO,
            "closeup_max": CLOSEUP_MAX_RATIO,
        }

    @app.get("/vocab")
    def get_vocab():
        return {"keywords": manager.vocab_listing()}

    @app.get("/lexicon")
    def get_lexicon():
        return {"emojis": manager.lexicon_listing()}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionModel):
        try:
            meta = manager.create_session(
                anchor=body.anchor,
                config_overrides=body.config,
                canvas=body.canvas or DEFAULT_CANVAS,
            )
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        return _state_payload(manager, meta.session_id)

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: uuid.UUID):
        return _state_payload(manager, session_id)

    @app.post("/sessions/{session_id}/panels")
    def submit_panel(session_id: uuid.UUID, body: PanelModel):
        try:
            box = PanelBox.from_dict(body.box.model_dump())
            strokes = SketchStrokes.from_dict(body.strokes.model_dump())
            result = manager.submit_panel(
                session_id,
                box=box,
                strokes=strokes,
                keyword=body.keyword,
                emoji=body.emoji,
            )
        except ValueError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        return _turn_payload(result)

    @app.post("/sessions/{session_id}/panels/{turn}/regenerate")
    def regenerate(session_id: uuid.UUID, turn: int):
        try:
            result = manager.regenerate(session_id, turn)
        except IndexError as exc:
            return JSONResponse(status_code=404, content={"detail": str(exc)})
        return _turn_payload(result)

    @app.get("/sessions/{session_id}/images/{name}")
    def get_image(session_id: uuid.UUID, name: str):
        if not _IMAGE_NAME.match(name):
            return JSONResponse(status_code=404, content={"detail": f"no image {name!r}"})
        path = manager.store.session_dir(session_id) / "images" / name
        if not path.is_file():
            return JSONResponse(status_code=404, content={"detail": f"no image {name!r}"})
        return Response(content=path.read_bytes(), media_type="image/png")

    @app.get("/sessions/{session_id}/export")
    def export(session_id: uuid.UUID):
        with tempfile.TemporaryDirectory(prefix="flux-export-") as tmp:
            out = Path(tmp) / "comic"
            manager.export(session_id, out)
            payload = _deterministic_zip(out)
        return Response(
            content=payload,
            media_type="application/zip",
            headers={
                "Content-Disposition": f'attachment; filename="comic_{session_id}.zip"'
            },
        )

    if ui_dir is not None and ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
