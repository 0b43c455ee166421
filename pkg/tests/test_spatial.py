import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from genreflux import (
    CompositionClass,
    ControlImage,
    PanelBox,
    SketchStrokes,
    classify_aspect,
    composition_directive,
    rasterize_sketch,
    snap_resolution,
)

from oracles import horizontal_row_pixels

sides = st.floats(min_value=1.0, max_value=4096.0, allow_nan=False)


def lit_pixels(image: ControlImage) -> set[tuple[int, int]]:
    arr = image.to_array()
    ys, xs = np.nonzero(arr)
    return {(int(x), int(y)) for x, y in zip(xs, ys)}


class TestPanelBox:
    def test_negative_origin_rejected(self):
        with pytest.raises(ValueError):
            PanelBox(-1, 0, 10, 10)

    @pytest.mark.parametrize("w,h", [(0, 10), (10, 0), (-5, 10)])
    def test_non_positive_sides_rejected(self, w, h):
        with pytest.raises(ValueError):
            PanelBox(0, 0, w, h)

    def test_fits_canvas_is_inclusive_at_the_edge(self):
        box = PanelBox(100, 100, 500, 400)
        assert box.fits_canvas(600, 500)
        assert not box.fits_canvas(599, 500)
        assert not box.fits_canvas(600, 499)

    def test_dict_round_trip(self):
        box = PanelBox(1, 2, 3, 4)
        assert PanelBox.from_dict(box.as_dict()) == box


class TestSketchStrokes:
    def test_single_point_polyline_rejected(self):
        with pytest.raises(ValueError):
            SketchStrokes(polylines=(((1.0, 1.0),),))

    def test_stroke_width_must_be_positive(self):
        with pytest.raises(ValueError):
            SketchStrokes(stroke_width=0)

    def test_within_box_is_inclusive_of_edges(self):
        box = PanelBox(0, 0, 100, 50)
        on_edge = SketchStrokes(polylines=(((0.0, 0.0), (100.0, 50.0)),))
        outside = SketchStrokes(polylines=(((0.0, 0.0), (100.0, 50.1)),))
        assert on_edge.within_box(box)
        assert not outside.within_box(box)

    def test_dict_round_trip(self):
        strokes = SketchStrokes(polylines=(((0.0, 1.0), (2.0, 3.0)),), stroke_width=5)
        assert SketchStrokes.from_dict(strokes.as_dict()) == strokes


class TestClassifyAspect:
    @pytest.mark.parametrize(
        "w,h,expected",
        [
            (1024, 400, CompositionClass.PANORAMIC),  # r = 2.56
            (400, 1024, CompositionClass.CLOSEUP),  # r = 0.39
            (512, 512, CompositionClass.MEDIUM),
            (1600, 600, CompositionClass.PANORAMIC),
            (700, 600, CompositionClass.MEDIUM),
        ],
    )
    def test_reference_boxes(self, w, h, expected):
        assert classify_aspect(PanelBox(0, 0, w, h)) is expected

    def test_boundary_ratios_are_inclusive(self):
        # 1800/1000 == 1.8 and 670/1000 == 0.67 exactly in float
        assert classify_aspect(PanelBox(0, 0, 1800, 1000)) is CompositionClass.PANORAMIC
        assert classify_aspect(PanelBox(0, 0, 670, 1000)) is CompositionClass.CLOSEUP
        assert classify_aspect(PanelBox(0, 0, 1799, 1000)) is CompositionClass.MEDIUM
        assert classify_aspect(PanelBox(0, 0, 671, 1000)) is CompositionClass.MEDIUM

    @given(w=sides, h=sides)
    def test_totality(self, w, h):
        assert classify_aspect(PanelBox(0, 0, w, h)) in CompositionClass


class TestCompositionDirective:
    def test_default_fragments(self):
        assert (
            composition_directive(CompositionClass.PANORAMIC)
            == "wide panoramic cinematic establishing shot"
        )
        assert composition_directive(CompositionClass.CLOSEUP) == "close-up character portrait"
        assert composition_directive(CompositionClass.MEDIUM) == "medium shot"

    def test_custom_table_wins(self):
        table = {
            CompositionClass.PANORAMIC: "sweeping vista",
            CompositionClass.MEDIUM: "waist-up framing",
            CompositionClass.CLOSEUP: "tight portrait",
        }
        assert composition_directive(CompositionClass.MEDIUM, table) == "waist-up framing"


class TestSnapResolution:
    @pytest.mark.parametrize(
        "w,h,max_side,expected",
        [
            (1024, 400, 1024, (1024, 384)),  # 400 -> nearest multiple is 384
            (512, 512, 512, (512, 512)),
            (100, 30, 512, (512, 128)),  # 30*5.12 = 153.6 -> 2 units
            (512, 96, 512, (512, 128)),  # 96/64 = 1.5 rounds half up
            (512, 32, 512, (512, 64)),  # floor of 64 enforced
            (1600, 600, 512, (512, 192)),
        ],
    )
    def test_reference_resolutions(self, w, h, max_side, expected):
        assert snap_resolution(PanelBox(0, 0, w, h), max_side) == expected

    def test_max_side_must_cover_one_step(self):
        with pytest.raises(ValueError):
            snap_resolution(PanelBox(0, 0, 100, 100), 32)

    @given(w=sides, h=sides, max_side=st.sampled_from([64, 128, 512, 768, 1024]))
    def test_outputs_are_aligned_and_bounded(self, w, h, max_side):
        width, height = snap_resolution(PanelBox(0, 0, w, h), max_side)
        for value in (width, height):
            assert value % 64 == 0
            assert 64 <= value <= max_side


class TestRasterize:
    def test_empty_strokes_yield_background(self):
        image = rasterize_sketch(SketchStrokes(), PanelBox(0, 0, 512, 512), (64, 64))
        assert image.to_array().sum() == 0
        assert (image.width, image.height) == (64, 64)

    def test_horizontal_line_is_one_exact_row(self):
        # against the naive row oracle: width-1 brush, panel-local row y=10
        box = PanelBox(0, 0, 64, 64)
        strokes = SketchStrokes(polylines=(((0.0, 10.0), (63.0, 10.0)),), stroke_width=1)
        image = rasterize_sketch(strokes, box, (64, 64))
        assert lit_pixels(image) == horizontal_row_pixels(10, 0, 63, 64)

    def test_endpoint_at_box_edge_clamps_into_bitmap(self):
        box = PanelBox(0, 0, 64, 64)
        strokes = SketchStrokes(polylines=(((0.0, 10.0), (64.0, 10.0)),), stroke_width=1)
        image = rasterize_sketch(strokes, box, (64, 64))
        assert lit_pixels(image) == horizontal_row_pixels(10, 0, 63, 64)

    def test_brush_width_covers_exact_band(self):
        box = PanelBox(0, 0, 64, 64)
        strokes = SketchStrokes(polylines=(((0.0, 10.0), (63.0, 10.0)),), stroke_width=3)
        rows = {y for _, y in lit_pixels(rasterize_sketch(strokes, box, (64, 64)))}
        assert rows == {9, 10, 11}

    def test_determinism(self):
        box = PanelBox(0, 0, 800, 600)
        strokes = SketchStrokes(
            polylines=(((10.0, 20.0), (700.0, 500.0), (30.0, 550.0)),), stroke_width=4
        )
        a = rasterize_sketch(strokes, box, (256, 192))
        b = rasterize_sketch(strokes, box, (256, 192))
        assert a.pixels == b.pixels

    @given(
        x0=st.integers(min_value=0, max_value=63),
        y0=st.integers(min_value=0, max_value=63),
        x1=st.integers(min_value=0, max_value=63),
        y1=st.integers(min_value=0, max_value=63),
    )
    def test_segment_covers_endpoints_within_bbox_and_connected(self, x0, y0, x1, y1):
        box = PanelBox(0, 0, 64, 64)
        strokes = SketchStrokes(
            polylines=(((float(x0), float(y0)), (float(x1), float(y1))),), stroke_width=1
        )
        pixels = lit_pixels(rasterize_sketch(strokes, box, (64, 64)))
        assert (x0, y0) in pixels and (x1, y1) in pixels
        xs = {x for x, _ in pixels}
        ys = {y for _, y in pixels}
        assert min(xs) >= min(x0, x1) and max(xs) <= max(x0, x1)
        assert min(ys) >= min(y0, y1) and max(ys) <= max(y0, y1)
        # 8-connectivity: every pixel has a neighbor unless the segment is a point
        if len(pixels) > 1:
            for px, py in pixels:
                assert any(
                    (px + dx, py + dy) in pixels
                    for dx in (-1, 0, 1)
                    for dy in (-1, 0, 1)
                    if (dx, dy) != (0, 0)
                )

    @given(
        points=st.lists(
            st.tuples(
                st.floats(min_value=0.0, max_value=400.0, allow_nan=False),
                st.floats(min_value=0.0, max_value=300.0, allow_nan=False),
            ),
            min_size=2,
            max_size=6,
        ),
        width=st.integers(min_value=1, max_value=6),
    )
    def test_scaling_equivariance(self, points, width):
        # doubling the panel and the strokes together changes nothing:
        # the target bitmap only sees relative coordinates
        target = (128, 96)
        base_box = PanelBox(0, 0, 400, 300)
        base = rasterize_sketch(
            SketchStrokes(polylines=(tuple(points),), stroke_width=width), base_box, target
        )
        doubled_box = PanelBox(0, 0, 800, 600)
        doubled = rasterize_sketch(
            SketchStrokes(
                polylines=(tuple((x * 2, y * 2) for x, y in points),), stroke_width=width
            ),
            doubled_box,
            target,
        )
        assert base.pixels == doubled.pixels


class TestControlImage:
    def test_buffer_size_validated(self):
        with pytest.raises(ValueError):
            ControlImage(width=4, height=4, pixels=b"\x00" * 15)

    def test_png_round_trip(self):
        box = PanelBox(0, 0, 64, 64)
        strokes = SketchStrokes(polylines=(((5.0, 5.0), (60.0, 40.0)),), stroke_width=2)
        image = rasterize_sketch(strokes, box, (64, 64))
        again = ControlImage.from_png(image.to_png())
        assert again == image
