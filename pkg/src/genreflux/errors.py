"""Exception and warning types shared across the engine."""


class FluxError(Exception):
    """Base class for all engine errors."""


class DataFileError(FluxError):
    """A lexicon/vocabulary/style/config file failed validation at load."""


class UnknownEmoji(FluxError):
    """The emoji is not in the lexicon (UI and lexicon have drifted)."""

    def __init__(self, emoji: str, turn_index: int | None = None):
        at = f" (at turn {turn_index})" if turn_index is not None else ""
        super().__init__(f"emoji not in lexicon: {emoji!r}{at}")
        self.emoji = emoji
        self.turn_index = turn_index


class UnknownKeyword(FluxError):
    """The keyword is not in the vocabulary."""

    def __init__(self, keyword: str, turn_index: int | None = None):
        at = f" (at turn {turn_index})" if turn_index is not None else ""
        super().__init__(f"keyword not in vocabulary: {keyword!r}{at}")
        self.keyword = keyword
        self.turn_index = turn_index


class MissingGenre(FluxError):
    """The style registry has no modifier for a genre."""


class BackendError(FluxError):
    """Base class for image-backend failures."""


class BackendUnreachable(BackendError):
    """The backend could not be reached after exhausting retries."""


class BackendRejected(BackendError):
    """The backend answered with a non-retryable 4xx."""

    def __init__(self, status: int, body: str):
        super().__init__(f"backend rejected request: {status} {body[:200]}")
        self.status = status
        self.body = body


class DimensionMismatch(BackendError):
    """The backend returned an image whose size differs from the request."""


class StoreError(FluxError):
    """Base class for persistence errors."""


class UnknownSession(StoreError):
    """No session with that id exists."""


class OutOfOrderEvent(StoreError):
    """An appended event does not follow the log's turn/counter sequence."""


class CorruptLog(StoreError):
    """Non-trailing garbage in an event log; the session cannot be recovered."""


class NoPanels(StoreError):
    """Export requested for a session without any generated panel."""


class DegenerateVocabulary(UserWarning):
    """Every keyword frequency is zero; rarity collapses to the maximum."""
