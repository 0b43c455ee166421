"""Access to the packaged default lexicon, vocabulary, style registry and config."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .affect import EmojiLexicon, FluxConfig, KeywordVocabulary
from .prompts import StyleRegistry


def data_path(name: str) -> Path:
    # the package is always installed as a plain directory, so the
    # traversable maps straight onto a filesystem path
    return Path(str(resources.files("genreflux").joinpath("data", name)))


def default_lexicon() -> EmojiLexicon:
    return EmojiLexicon.from_file(data_path("lexicon.json"))


def default_vocabulary() -> KeywordVocabulary:
    return KeywordVocabulary.from_file(data_path("vocabulary.json"))


def default_styles() -> StyleRegistry:
    return StyleRegistry.from_file(data_path("styles.json"))


def default_config() -> FluxConfig:
    return FluxConfig.from_file(data_path("config.json"))
