"""A six-panel story that falls in love and then falls apart.

Walks one session through the full pipeline with the mock backend: romance
keywords push the accumulator over the threshold by turn 2, then a string of
losses displaces Romance with Tragedy mid-story.  Prints the narrative state
as text bars each turn and exports the finished comic.

Run:  python3 demos/genre_drift.py
"""

from pathlib import Path
from tempfile import TemporaryDirectory

from genreflux import PanelBox, SessionManager, SessionStore, SketchStrokes

OUT = Path(__file__).parent / "out" / "genre-drift"

ANCHOR = "young woman, silver bob haircut, denim jacket"

# (keyword, emoji, box) per turn; the arc is romance -> heartbreak
TURNS = [
    ("Coffee Shop", "❤️", PanelBox(0, 0, 800, 700)),
    ("First Date", "🌹", PanelBox(800, 0, 800, 700)),
    ("Love Letter", "💋", PanelBox(0, 700, 500, 500)),
    ("Goodbye", "💔", PanelBox(500, 700, 1100, 500)),
    ("Funeral", "⚰️", PanelBox(0, 0, 1600, 600)),
    ("Gunshot", "😢", PanelBox(0, 600, 400, 600)),
]

SKETCH = SketchStrokes(polylines=(((50.0, 50.0), (300.0, 200.0)),), stroke_width=3)


def bar(value: float, threshold: float, scale: float = 8.0) -> str:
    filled = int(round(value * scale / threshold))
    return ("#" * filled).ljust(int(scale * 2))[:24]


def main() -> None:
    with TemporaryDirectory(prefix="flux-demo-") as tmp:
        manager = SessionManager(SessionStore(tmp))
        meta = manager.create_session(ANCHOR)
        threshold = meta.config.flux_threshold
        print(f"session {meta.session_id}  (threshold {threshold})\n")

        for keyword, emoji, box in TURNS:
            result = manager.submit_panel(
                meta.session_id, box=box, strokes=SKETCH, keyword=keyword, emoji=emoji
            )
            state = result.state
            active = result.active_genre.value if result.active_genre else "-"
            flux = "  << genre flux!" if result.flux_triggered else ""
            print(f"turn {result.turn_index}: {keyword} + {emoji}   active={active}{flux}")
            for name, value in state.as_dict().items():
                marker = " <" if active.lower() == name else ""
                print(f"    {name:8s} {bar(value, threshold)} {value:6.3f}{marker}")
            print(f"    prompt: {result.prompt_preview[:90]}...")
            print()

        manifest = manager.export(meta.session_id, OUT)
        print(f"exported {len(manifest['panels'])} panels to {OUT}")


if __name__ == "__main__":
    main()
