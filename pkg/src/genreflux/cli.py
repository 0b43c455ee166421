"""Command line entry points.

``flux serve`` runs the HTTP service; ``flux run`` executes a scripted
session headlessly against the mock (or a real) backend and exports the
comic.  Every flag can also be supplied as an environment variable with the
``FLUX_`` prefix (flag wins over env, env wins over default).

Scripted runs are fully deterministic: the session id is derived from the
script bytes and event timestamps are synthesized from turn indices, so the
same script always produces a byte-identical export.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import uuid
from pathlib import Path

from . import assets
from .affect import EmojiLexicon, FluxConfig, KeywordVocabulary
from .backend import BackendConfig, BackendKind, make_backend
from .engine import DEFAULT_CANVAS, SessionManager
from .errors import FluxError
from .prompts import StyleRegistry
from .spatial import PanelBox, SketchStrokes
from .store import SessionStore

#: Namespace for script-derived session ids (fixed so reruns share the id).
_SCRIPT_NAMESPACE = uuid.UUID("9c0c5c5e-2f6b-5b8f-9f6a-1d2e3f405162")


def _env(name: str, default: str | None = None) -> str | None:
    return os.environ.get(f"FLUX_{name}", default)


def _add_asset_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--vocab", default=_env("VOCAB"), help="keyword vocabulary JSON (default: packaged)"
    )
    parser.add_argument(
        "--lexicon", default=_env("LEXICON"), help="emoji lexicon JSON (default: packaged)"
    )
    parser.add_argument(
        "--styles", default=_env("STYLES"), help="style registry JSON (default: packaged)"
    )
    parser.add_argument(
        "--config", default=_env("CONFIG"), help="flux config JSON (default: packaged)"
    )
    parser.add_argument(
        "--backend",
        choices=[k.value for k in BackendKind],
        default=_env("BACKEND", "mock"),
        help="image backend (default: mock)",
    )
    parser.add_argument(
        "--backend-url",
        default=_env("BACKEND_URL"),
        help="base URL of the http backend (required with --backend http)",
    )
    parser.add_argument(
        "--max-side",
        type=int,
        default=int(_env("MAX_SIDE", "512")),
        help="long-side cap for generated panels in pixels (default: 512)",
    )


def _build_manager(args: argparse.Namespace, data_dir: Path) -> SessionManager:
    lexicon = (
        EmojiLexicon.from_file(args.lexicon) if args.lexicon else assets.default_lexicon()
    )
    vocab = (
        KeywordVocabulary.from_file(args.vocab) if args.vocab else assets.default_vocabulary()
    )
    styles = (
        StyleRegistry.from_file(args.styles) if args.styles else assets.default_styles()
    )
    config = FluxConfig.from_file(args.config) if args.config else assets.default_config()
    backend_config = BackendConfig(
        kind=BackendKind(args.backend), base_url=args.backend_url
    )
    return SessionManager(
        store=SessionStore(data_dir),
        backend=make_backend(backend_config, styles),
        lexicon=lexicon,
        vocab=vocab,
        styles=styles,
        config=config,
        max_side=args.max_side,
    )


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    data_dir = Path(args.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    manager = _build_manager(args, data_dir)
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    app = create_app(manager, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _format_state(vector) -> str:
    return (
        f"R={vector.romance:.4f} T={vector.tragedy:.4f} "
        f"C={vector.chaos:.4f} M={vector.mystery:.4f}"
    )


def _run_script(manager: SessionManager, script: dict, script_bytes: bytes, out: Path) -> int:
    digest = hashlib.sha256(script_bytes).hexdigest()
    session_id = uuid.uuid5(_SCRIPT_NAMESPACE, digest)

    canvas = tuple(script.get("canvas", DEFAULT_CANVAS))
    meta = manager.create_session(
        anchor=script["anchor"],
        config_overrides=script.get("config"),
        canvas=canvas,  # type: ignore[arg-type]
        session_id=session_id,
        created_at_ms=0,
    )
    print(f"session {meta.session_id}")

    for i, turn in enumerate(script["turns"], start=1):
        box = PanelBox.from_dict(turn["box"])
        strokes = SketchStrokes.from_dict(turn.get("strokes", {}))
        result = manager.submit_panel(
            meta.session_id,
            box=box,
            strokes=strokes,
            keyword=turn["keyword"],
            emoji=turn["emoji"],
            timestamp_ms=i * 1000,
        )
        marker = "  flux!" if result.flux_triggered else ""
        active = result.active_genre.value if result.active_genre else "-"
        print(f"turn {result.turn_index}  {_format_state(result.state)}  active={active}{marker}")
        for _ in range(int(turn.get("regenerate", 0))):
            regen = manager.regenerate(meta.session_id, result.turn_index)
            print(
                f"turn {regen.turn_index}  regenerated "
                f"(counter {regen.regeneration_counter})"
            )

    manifest = manager.export(meta.session_id, out)
    print(f"exported {len(manifest['panels'])} panel(s) to {out}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    script_path = Path(args.script)
    script_bytes = script_path.read_bytes()
    script = json.loads(script_bytes.decode("utf-8"))
    out = Path(args.out)

    if args.data_dir:
        data_dir = Path(args.data_dir)
        data_dir.mkdir(parents=True, exist_ok=True)
        manager = _build_manager(args, data_dir)
        return _run_script(manager, script, script_bytes, out)

    with tempfile.TemporaryDirectory(prefix="flux-run-") as tmp:
        manager = _build_manager(args, Path(tmp))
        return _run_script(manager, script, script_bytes, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flux",
        description="Co-creative comic engine: genre-flux sessions over HTTP or scripts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default=_env("HOST", "127.0.0.1"))
    serve.add_argument("--port", type=int, default=int(_env("PORT", "8765")))
    serve.add_argument(
        "--data-dir",
        default=_env("DATA_DIR", "./flux-data"),
        help="session storage root (default: ./flux-data)",
    )
    serve.add_argument(
        "--ui-dir",
        default=_env("UI_DIR"),
        help="static frontend bundle to mount at /ui (optional)",
    )
    _add_asset_flags(serve)
    serve.set_defaults(func=_cmd_serve)

    run = sub.add_parser("run", help="execute a scripted session headlessly")
    run.add_argument("--script", required=True, help="session script JSON")
    run.add_argument("--out", required=True, help="export output directory")
    run.add_argument(
        "--data-dir",
        default=_env("DATA_DIR"),
        help="persist session data here (default: temporary directory)",
    )
    _add_asset_flags(run)
    run.set_defaults(func=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FluxError, FileExistsError, ValueError) as exc:
        # domain errors, an already-used data dir, and bad script/flag values
        # are all user input problems: message + exit 2, no traceback
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
