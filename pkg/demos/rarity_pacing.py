"""Rarity amplification and spatial pacing, isolated from everything else.

Part 1 is a controlled experiment: two keywords carry the identical mystery
weight, but one is common (frequency 100 -> beta 1.0) and one is rare
(frequency 0 -> beta 3.0).  Rarity alone moves the genre flux from turn 9 to
turn 2.

Part 2 sweeps panel boxes across the three aspect classes and shows the
composition directive and snapped generation resolution each one gets.

Run:  python3 demos/rarity_pacing.py
"""

from genreflux import (
    EmojiLexicon,
    EmotionVector,
    FluxConfig,
    KeywordVocabulary,
    NarrativeState,
    PanelBox,
    classify_aspect,
    rarity_multiplier,
    snap_resolution,
    step,
)
from genreflux.affect import VocabEntry

CONFIG = FluxConfig()

VOCAB = KeywordVocabulary(
    {
        "Habit": VocabEntry(EmotionVector(mystery=0.6), 100, "the same corridor as always"),
        "Omen": VocabEntry(EmotionVector(mystery=0.6), 0, "a sign nobody can place"),
    }
)
LEXICON = EmojiLexicon({"😶": EmotionVector()})  # carries nothing: keyword-only injection

BOXES = [
    ("cinemascope", PanelBox(0, 0, 1600, 600)),
    ("storyboard", PanelBox(0, 0, 900, 700)),
    ("portrait", PanelBox(0, 0, 400, 900)),
    ("sliver", PanelBox(0, 0, 200, 1100)),
]


def flux_turn(keyword: str, limit: int = 15) -> int | None:
    state = NarrativeState.initial()
    for turn in range(1, limit + 1):
        state = step(state, keyword, "😶", LEXICON, VOCAB, CONFIG)
        if state.active_genre is not None:
            return turn
    return None


def main() -> None:
    print("-- rarity amplification ----------------------------------------")
    for keyword in VOCAB.entries:
        beta = rarity_multiplier(keyword, VOCAB, CONFIG)
        turn = flux_turn(keyword)
        arrival = f"flux at turn {turn}" if turn else "no flux within 15 turns"
        print(f"{keyword:6s}  beta={beta:.1f}  {arrival}")
    print()
    print("same weights, same emoji; only the keyword's frequency differs.\n")

    print("-- spatial pacing ----------------------------------------------")
    for label, box in BOXES:
        aspect = classify_aspect(box)
        width, height = snap_resolution(box, 512)
        ratio = box.width / box.height
        print(
            f"{label:12s} {box.width:.0f}x{box.height:.0f}  (ratio {ratio:4.2f})"
            f"  -> {aspect.value:9s} at {width}x{height}"
        )


if __name__ == "__main__":
    main()
