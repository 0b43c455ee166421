"""Image backends: an HTTP text-to-image client and a deterministic mock.

The wire contract for the HTTP backend is a single POST {base_url}/generate
with JSON

    {"prompt": str, "negative_prompt": str, "width": int, "height": int,
     "seed": int, "control_image": base64 PNG or null}

answered by ``{"image": base64 PNG}``.  Transient failures (connection
errors, timeouts, 5xx) are retried with exponential backoff; 4xx means the
request itself was rejected and is not retried.

The mock backend exists so genre flux is machine-checkable without a
diffusion model: it fills the panel with a color keyed to whichever genre's
style fragments appear in the prompt, overlays an integer-PRNG texture seeded
by the request seed, and composites control strokes as dark lines.  Identical
requests produce byte-identical PNGs.
"""

from __future__ import annotations

import base64
import io
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np
import requests
from PIL import Image

from .affect import GENRE_ORDER, Genre
from .errors import BackendRejected, BackendUnreachable, DimensionMismatch
from .prompts import GenerationRequest, StyleRegistry

#: Base fill colors per detected genre; None key = no genre fragments found.
GENRE_TINTS: dict[Genre | None, tuple[int, int, int]] = {
    None: (128, 128, 128),          # neutral gray
    Genre.ROMANCE: (214, 126, 146),  # warm rose: R mean > B mean
    Genre.TRAGEDY: (64, 88, 150),    # desaturated blue: B mean > R mean
    Genre.CHAOS: (230, 110, 30),     # one half of a clashing checker
    Genre.MYSTERY: (120, 52, 160),   # deep violet: R and B means > G mean
}

#: Second checker color for Chaos (high per-pixel saturation).
CHAOS_ALT_TINT = (40, 190, 90)


@dataclass(frozen=True)
class PanelImage:
    """Encoded output of one generation plus its request lineage."""

    width: int
    height: int
    png_bytes: bytes
    backend_id: str
    request_digest: str

    def decode(self) -> np.ndarray:
        img = Image.open(io.BytesIO(self.png_bytes)).convert("RGB")
        return np.asarray(img, dtype=np.uint8)


class BackendKind(str, Enum):
    MOCK = "mock"
    HTTP = "http"


@dataclass(frozen=True)
class BackendConfig:
    kind: BackendKind = BackendKind.MOCK
    base_url: str | None = None
    timeout: float = 30.0
    max_retries: int = 2
    backoff_base: float = 0.25

    def __post_init__(self):
        if self.kind is BackendKind.HTTP and not self.base_url:
            raise ValueError("http backend requires base_url")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64_array(x: np.ndarray) -> np.ndarray:
    # vectorized splitmix64 finalizer; uint64 ops wrap, no float involved
    x = (x + np.uint64(0x9E3779B97F4A7C15)) & _MASK
    x = ((x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK
    x = ((x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK
    return (x ^ (x >> np.uint64(31))) & _MASK


def _detect_genre(prompt: str, styles: StyleRegistry) -> Genre | None:
    # whichever genre has the most positive fragments present wins;
    # canonical genre order breaks ties
    best: Genre | None = None
    best_hits = 0
    for genre in GENRE_ORDER:
        modifier = styles.modifiers.get(genre)
        if modifier is None:
            continue
        hits = sum(1 for phrase in modifier.positive_fragments if phrase in prompt)
        if hits > best_hits:
            best, best_hits = genre, hits
    return best


class MockBackend:
    """Offline stand-in whose pixels encode the active genre as color statistics."""

    backend_id = "mock"

    def __init__(self, styles: StyleRegistry | None = None):
        if styles is None:
            from .assets import default_styles

            styles = default_styles()
        self.styles = styles

    def generate(self, request: GenerationRequest) -> PanelImage:
        w, h = request.width, request.height
        genre = _detect_genre(request.prompt, self.styles)

        base = np.empty((h, w, 3), dtype=np.int64)
        base[:, :] = GENRE_TINTS[genre]
        if genre is Genre.CHAOS:
            ys, xs = np.mgrid[0:h, 0:w]
            checker = ((ys // 16 + xs // 16) % 2).astype(bool)
            base[checker] = CHAOS_ALT_TINT

        # per-pixel jitter from a counter-based integer PRNG keyed by the seed
        idx = np.arange(h * w, dtype=np.uint64).reshape(h, w)
        noise = _splitmix64_array(idx ^ np.uint64(request.seed))
        for channel, shift in enumerate((0, 8, 16)):
            jitter = ((noise >> np.uint64(shift)) & np.uint64(0x1F)).astype(np.int64) - 16
            base[:, :, channel] += jitter

        if request.control_image is not None:
            strokes = request.control_image.to_array() == 255
            if strokes.shape != (h, w):
                raise DimensionMismatch(
                    f"control image is {strokes.shape[1]}x{strokes.shape[0]}, "
                    f"request is {w}x{h}"
                )
            base[strokes] //= 4  # strokes read as dark lines

        pixels = np.clip(base, 0, 255).astype(np.uint8)
        buf = io.BytesIO()
        Image.fromarray(pixels, mode="RGB").save(buf, format="PNG")
        return PanelImage(
            width=w,
            height=h,
            png_bytes=buf.getvalue(),
            backend_id=self.backend_id,
            request_digest=request.digest(),
        )


def mock_generate(request: GenerationRequest, styles: StyleRegistry | None = None) -> PanelImage:
    """One-shot mock generation against the packaged style registry."""
    return MockBackend(styles).generate(request)


class HttpBackend:
    """Client for any server speaking the documented /generate contract."""

    def __init__(self, config: BackendConfig, session: requests.Session | None = None):
        if config.kind is not BackendKind.HTTP:
            raise ValueError("HttpBackend requires an http BackendConfig")
        self.config = config
        self.backend_id = f"http:{config.base_url}"
        self._session = session or requests.Session()

    def _payload(self, request: GenerationRequest) -> dict:
        control = None
        if request.control_image is not None:
            control = base64.b64encode(request.control_image.to_png()).decode("ascii")
        return {
            "prompt": request.prompt,
            "negative_prompt": request.negative_prompt,
            "width": request.width,
            "height": request.height,
            "seed": request.seed,
            "control_image": control,
        }

    def generate(self, request: GenerationRequest) -> PanelImage:
        url = f"{self.config.base_url.rstrip('/')}/generate"
        payload = self._payload(request)
        digest = request.digest()  # computed before send; the request is never mutated
        attempts = self.config.max_retries + 1
        last_error: Exception | None = None

        for attempt in range(attempts):
            if attempt:
                time.sleep(self.config.backoff_base * 2 ** (attempt - 1))
            try:
                response = self._session.post(url, json=payload, timeout=self.config.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if 400 <= response.status_code < 500:
                raise BackendRejected(response.status_code, response.text)
            if response.status_code != 200:
                last_error = BackendUnreachable(f"server answered {response.status_code}")
                continue
            return self._decode(response, request, digest)

        raise BackendUnreachable(
            f"backend at {self.config.base_url} failed {attempts} attempt(s): {last_error}"
        )

    def _decode(
        self, response: requests.Response, request: GenerationRequest, digest: str
    ) -> PanelImage:
        try:
            png = base64.b64decode(response.json()["image"], validate=True)
            img = Image.open(io.BytesIO(png))
            img.verify()
            size = img.size
        except Exception as exc:
            raise BackendRejected(response.status_code, f"undecodable image payload: {exc}")
        if size != (request.width, request.height):
            raise DimensionMismatch(
                f"requested {request.width}x{request.height}, got {size[0]}x{size[1]}"
            )
        return PanelImage(
            width=request.width,
            height=request.height,
            png_bytes=png,
            backend_id=self.backend_id,
            request_digest=digest,
        )


def make_backend(config: BackendConfig, styles: StyleRegistry | None = None):
    if config.kind is BackendKind.MOCK:
        return MockBackend(styles)
    return HttpBackend(config)


def generate(request: GenerationRequest, config: BackendConfig) -> PanelImage:
    """Generate one panel through whichever backend the config selects."""
    return make_backend(config).generate(request)
