"""Spatial pacing: panel boxes become composition classes and guidance bitmaps.

The sketched panel frame controls camera language: wide short boxes read as
panoramic establishing shots, tall narrow ones as close-up portraits.  The
freehand strokes inside the frame are scan-converted into a single-channel
guidance bitmap the image backend may condition on (or ignore).  All pixel
work is integer-only so identical inputs give byte-identical bitmaps on any
platform.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum

import numpy as np
from PIL import Image

#: Aspect-ratio cutoffs; >= PANORAMIC_MIN_RATIO is panoramic, <= CLOSEUP_MAX_RATIO close-up.
PANORAMIC_MIN_RATIO = 1.8
CLOSEUP_MAX_RATIO = 0.67

#: Diffusion-style backends want dimensions on a 64px latent grid.
DIMENSION_STEP = 64


class CompositionClass(str, Enum):
    PANORAMIC = "Panoramic"
    MEDIUM = "Medium"
    CLOSEUP = "CloseUp"


@dataclass(frozen=True)
class PanelBox:
    """Axis-aligned panel frame in canvas pixels."""

    x: float
    y: float
    width: float
    height: float

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise ValueError(f"box origin must be >= 0, got ({self.x}, {self.y})")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"box sides must be > 0, got {self.width}x{self.height}")

    def fits_canvas(self, canvas_width: float, canvas_height: float) -> bool:
        return self.x + self.width <= canvas_width and self.y + self.height <= canvas_height

    @classmethod
    def from_dict(cls, data: dict) -> "PanelBox":
        return cls(
            x=float(data["x"]),
            y=float(data["y"]),
            width=float(data["width"]),
            height=float(data["height"]),
        )

    def as_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "width": self.width, "height": self.height}


@dataclass(frozen=True)
class SketchStrokes:
    """Freehand polylines in panel-local coordinates.

    ``stroke_width`` is the square-brush side in target-bitmap pixels; the
    polyline geometry scales with the panel, the brush does not.
    """

    polylines: tuple[tuple[tuple[float, float], ...], ...] = ()
    stroke_width: int = 3

    def __post_init__(self):
        if self.stroke_width < 1:
            raise ValueError(f"stroke_width must be >= 1, got {self.stroke_width}")
        for line in self.polylines:
            if len(line) < 2:
                raise ValueError("every polyline needs at least 2 points")

    def within_box(self, box: PanelBox) -> bool:
        return all(
            0 <= px <= box.width and 0 <= py <= box.height
            for line in self.polylines
            for px, py in line
        )

    @classmethod
    def from_dict(cls, data: dict) -> "SketchStrokes":
        polylines = tuple(
            tuple((float(x), float(y)) for x, y in line) for line in data.get("polylines", [])
        )
        return cls(polylines=polylines, stroke_width=int(data.get("stroke_width", 3)))

    def as_dict(self) -> dict:
        return {
            "polylines": [[[x, y] for x, y in line] for line in self.polylines],
            "stroke_width": self.stroke_width,
        }


@dataclass(frozen=True)
class ControlImage:
    """Single-channel guidance bitmap: 0 background, 255 stroke."""

    width: int
    height: int
    pixels: bytes  # row-major, height*width bytes

    def __post_init__(self):
        if len(self.pixels) != self.width * self.height:
            raise ValueError(
                f"pixel buffer holds {len(self.pixels)} bytes, "
                f"expected {self.width * self.height}"
            )

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width)

    def to_png(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.to_array(), mode="L").save(buf, format="PNG")
        return buf.getvalue()

    @classmethod
    def from_png(cls, data: bytes) -> "ControlImage":
        img = Image.open(io.BytesIO(data)).convert("L")
        arr = np.asarray(img, dtype=np.uint8)
        return cls(width=img.width, height=img.height, pixels=arr.tobytes())


def classify_aspect(
    box: PanelBox,
    panoramic_min: float = PANORAMIC_MIN_RATIO,
    closeup_max: float = CLOSEUP_MAX_RATIO,
) -> CompositionClass:
    """Total classification of a box by width/height ratio (cutoffs inclusive)."""
    ratio = box.width / box.height
    if ratio >= panoramic_min:
        return CompositionClass.PANORAMIC
    if ratio <= closeup_max:
        return CompositionClass.CLOSEUP
    return CompositionClass.MEDIUM


#: Prompt fragments per composition class; a style registry may override them.
DEFAULT_DIRECTIVES: dict[CompositionClass, str] = {
    CompositionClass.PANORAMIC: "wide panoramic cinematic establishing shot",
    CompositionClass.MEDIUM: "medium shot",
    CompositionClass.CLOSEUP: "close-up character portrait",
}


def composition_directive(
    composition: CompositionClass,
    directives: dict[CompositionClass, str] | None = None,
) -> str:
    """Prompt fragment describing the camera language for a composition class."""
    table = directives if directives is not None else DEFAULT_DIRECTIVES
    return table[composition]


def snap_resolution(box: PanelBox, max_side: int = 1024) -> tuple[int, int]:
    """Generation resolution for a panel: long side scaled to ``max_side``,
    both dimensions snapped to the nearest multiple of 64 within [64, max_side].
    """
    if max_side < DIMENSION_STEP:
        raise ValueError(f"max_side must be >= {DIMENSION_STEP}, got {max_side}")
    scale = max_side / max(box.width, box.height)
    top = max(1, max_side // DIMENSION_STEP)

    def snap(side: float) -> int:
        units = int(side * scale / DIMENSION_STEP + 0.5)  # round half up
        return DIMENSION_STEP * min(top, max(1, units))

    return snap(box.width), snap(box.height)


def _plot_brush(bitmap: np.ndarray, x: int, y: int, brush: int) -> None:
    # square brush of `brush` pixels centred on (x, y), clipped to the bitmap
    half_lo = brush // 2
    half_hi = brush - half_lo  # covers exactly `brush` pixels
    h, w = bitmap.shape
    x0, x1 = max(0, x - half_lo), min(w, x + half_hi)
    y0, y1 = max(0, y - half_lo), min(h, y + half_hi)
    if x0 < x1 and y0 < y1:
        bitmap[y0:y1, x0:x1] = 255


def _draw_segment(bitmap: np.ndarray, x0: int, y0: int, x1: int, y1: int, brush: int) -> None:
    # classic integer Bresenham; no float arithmetic in the pixel loop
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        _plot_brush(bitmap, x, y, brush)
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def rasterize_sketch(
    strokes: SketchStrokes,
    box: PanelBox,
    target: tuple[int, int],
) -> ControlImage:
    """Scan-convert panel-local polylines into a guidance bitmap at ``target``.

    Point scaling maps [0, box side] onto [0, target side); an empty stroke
    list yields an all-background bitmap.
    """
    width, height = target
    bitmap = np.zeros((height, width), dtype=np.uint8)

    def to_pixel(px: float, py: float) -> tuple[int, int]:
        ix = int(px * width / box.width)
        iy = int(py * height / box.height)
        return min(width - 1, max(0, ix)), min(height - 1, max(0, iy))

    for line in strokes.polylines:
        points = [to_pixel(px, py) for px, py in line]
        for (x0, y0), (x1, y1) in zip(points, points[1:]):
            _draw_segment(bitmap, x0, y0, x1, y1, strokes.stroke_width)

    return ControlImage(width=width, height=height, pixels=bitmap.tobytes())
