"""Stroke/drawing containers, NDJSON I/O, resampling and augmentation."""

import json

import numpy as np
import pytest

from cose.ink import (
    AugmentParams,
    Drawing,
    ParseError,
    Stroke,
    augment_drawing,
    curve_point,
    curve_points,
    drawing_from_json,
    drawing_to_json,
    load_drawings,
    make_batch,
    normalize_drawing,
    resample_stroke,
    save_drawings,
    spatial_resample,
)
from conftest import random_stroke


class TestStroke:
    def test_holds_float64_points(self):
        s = Stroke([[0, 0], [1, 2]])
        assert s.points.dtype == np.float64
        assert s.points.shape == (2, 2)
        assert len(s) == 2

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            Stroke(np.zeros((0, 2)))
        with pytest.raises(ValueError):
            Stroke(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            Stroke(np.zeros(4))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Stroke([[0, 0], [np.nan, 1]])
        with pytest.raises(ValueError):
            Stroke([[0, 0], [1, 1]], times=[0, np.inf])

    def test_rejects_decreasing_times(self):
        with pytest.raises(ValueError):
            Stroke([[0, 0], [1, 1]], times=[10.0, 5.0])
        # equal timestamps are allowed (held pen)
        Stroke([[0, 0], [1, 1]], times=[10.0, 10.0])

    def test_times_length_must_match(self):
        with pytest.raises(ValueError):
            Stroke([[0, 0], [1, 1]], times=[0.0])

    def test_points_are_read_only(self):
        s = Stroke([[0, 0], [1, 1]])
        with pytest.raises(ValueError):
            s.points[0, 0] = 9.0

    def test_translated(self):
        s = Stroke([[1, 2], [3, 4]]).translated((10, -1))
        np.testing.assert_array_equal(s.points, [[11, 1], [13, 3]])

    def test_transformed_rotation(self):
        # quarter turn: (x, y) -> (-y, x)
        m = np.array([[0.0, -1.0], [1.0, 0.0]])
        s = Stroke([[1, 0], [0, 2]]).transformed(m)
        np.testing.assert_allclose(s.points, [[0, 1], [-2, 0]], atol=1e-15)


class TestDrawing:
    def test_requires_a_stroke(self):
        with pytest.raises(ValueError):
            Drawing([])

    def test_start_positions(self):
        d = Drawing([Stroke([[1, 2], [3, 4]]), Stroke([[5, 6]])])
        np.testing.assert_array_equal(d.start_positions, [[1, 2], [5, 6]])

    def test_bounding_box(self):
        d = Drawing([Stroke([[0, -1], [2, 3]]), Stroke([[5, 0]])])
        lo, hi = d.bounding_box()
        np.testing.assert_array_equal(lo, [0, -1])
        np.testing.assert_array_equal(hi, [5, 3])


class TestNdjson:
    def test_single_line_single_stroke(self, tmp_path):
        p = tmp_path / "d.ndjson"
        p.write_text('{"strokes": [[[0, 0], [1, 1]]]}\n')
        ds = load_drawings(p)
        assert len(ds) == 1 and len(ds[0]) == 1 and len(ds[0].strokes[0]) == 2

    def test_empty_file(self, tmp_path):
        p = tmp_path / "d.ndjson"
        p.write_text("")
        assert load_drawings(p) == []

    def test_empty_stroke_reports_line(self, tmp_path):
        p = tmp_path / "d.ndjson"
        p.write_text('{"strokes": [[]]}\n')
        with pytest.raises(ParseError, match="empty stroke at line 1"):
            load_drawings(p)

    def test_invalid_json_reports_line(self, tmp_path):
        p = tmp_path / "d.ndjson"
        p.write_text('{"strokes": [[[0,0],[1,1]]]}\nnot json\n')
        with pytest.raises(ParseError, match="line 2"):
            load_drawings(p)

    def test_missing_strokes_key(self, tmp_path):
        p = tmp_path / "d.ndjson"
        p.write_text('{"lines": []}\n')
        with pytest.raises(ParseError, match="strokes"):
            load_drawings(p)

    def test_timestamped_rows_round_trip(self, tmp_path):
        d = Drawing([Stroke([[0, 0], [1, 1]], times=[0.0, 20.0])])
        p = tmp_path / "d.ndjson"
        save_drawings(p, [d])
        back = load_drawings(p)[0]
        np.testing.assert_array_equal(back.strokes[0].points, d.strokes[0].points)
        np.testing.assert_array_equal(back.strokes[0].times, [0.0, 20.0])

    def test_round_trip_preserves_values(self, tmp_path, rng):
        ds = [Drawing([random_stroke(rng, 5), random_stroke(rng, 3)])]
        p = tmp_path / "d.ndjson"
        save_drawings(p, ds)
        back = load_drawings(p)
        for s0, s1 in zip(ds[0].strokes, back[0].strokes):
            np.testing.assert_array_equal(s0.points, s1.points)

    def test_blank_lines_skipped(self, tmp_path):
        p = tmp_path / "d.ndjson"
        p.write_text('\n{"strokes": [[[0, 0]]]}\n\n')
        assert len(load_drawings(p)) == 1

    def test_drawing_from_json_rejects_bad_rows(self):
        with pytest.raises(ParseError):
            drawing_from_json({"strokes": [[[0, 0, 0, 0]]]})
        with pytest.raises(ParseError):
            drawing_from_json({"strokes": "nope"})

    def test_drawing_to_json_schema(self):
        d = Drawing([Stroke([[0, 0], [1, 2]])])
        obj = drawing_to_json(d)
        assert json.dumps(obj)  # serializable
        assert obj == {"strokes": [[[0.0, 0.0], [1.0, 2.0]]]}


class TestNormalize:
    def test_height_two_becomes_one(self):
        d = Drawing([Stroke([[0, 0], [4, 2]])])
        nd = normalize_drawing(d)
        np.testing.assert_allclose(nd.strokes[0].points, [[0, 0], [2, 1]])

    def test_unit_height_unchanged(self):
        d = Drawing([Stroke([[0, 0], [0.3, 1.0]])])
        nd = normalize_drawing(d)
        np.testing.assert_allclose(nd.strokes[0].points, d.strokes[0].points)

    def test_flat_drawing_uses_width(self):
        d = Drawing([Stroke([[0, 5], [4, 5]])])
        nd = normalize_drawing(d)
        lo, hi = nd.bounding_box()
        assert hi[0] - lo[0] == pytest.approx(1.0)

    def test_single_point_unchanged(self):
        d = Drawing([Stroke([[3, 3]])])
        nd = normalize_drawing(d)
        np.testing.assert_array_equal(nd.strokes[0].points, [[3, 3]])


class TestTemporalResample:
    def test_on_grid_points_unchanged(self):
        s = Stroke([[0, 0], [1, 0]], times=[0.0, 20.0])
        r = resample_stroke(s, 20.0)
        np.testing.assert_array_equal(r.points, s.points)
        np.testing.assert_array_equal(r.times, s.times)

    def test_interpolates_onto_grid(self):
        # independent piecewise-linear check: x(20) between 10ms and 40ms
        # samples is 2 + 6 * (10/30) = 4
        s = Stroke([[0, 0], [2, 0], [8, 0]], times=[0.0, 10.0, 40.0])
        r = resample_stroke(s, 20.0)
        np.testing.assert_allclose(r.points, [[0, 0], [4, 0], [8, 0]])
        np.testing.assert_allclose(r.times, [0.0, 20.0, 40.0])

    def test_single_point_passthrough(self):
        s = Stroke([[1, 1]], times=[5.0])
        r = resample_stroke(s)
        np.testing.assert_array_equal(r.points, s.points)

    def test_endpoint_kept_off_grid(self):
        s = Stroke([[0, 0], [1, 0]], times=[0.0, 30.0])
        r = resample_stroke(s, 20.0)
        # grid point at 20ms plus the retained final sample at 30ms
        np.testing.assert_allclose(r.times, [0.0, 20.0, 30.0])
        np.testing.assert_allclose(r.points[-1], [1, 0])

    def test_requires_times(self):
        with pytest.raises(ValueError, match="timestamps"):
            resample_stroke(Stroke([[0, 0], [1, 1]]))

    def test_repeated_times_use_later_sample(self):
        s = Stroke([[0, 0], [5, 5], [6, 0]], times=[0.0, 20.0, 20.0])
        r = resample_stroke(s, 20.0)
        # both input samples sit at 20ms; the later one wins
        np.testing.assert_allclose(r.points[1], [6, 0])

    def test_zero_duration_keeps_endpoints(self):
        s = Stroke([[0, 0], [1, 1], [2, 2]], times=[10.0, 10.0, 10.0])
        r = resample_stroke(s, 20.0)
        assert len(r) == 2
        np.testing.assert_array_equal(r.points, [[0, 0], [2, 2]])


class TestSpatialResample:
    def test_straight_segment_midpoint(self):
        r = spatial_resample(Stroke([[0, 0], [1, 0]]), 3)
        np.testing.assert_allclose(r.points, [[0, 0], [0.5, 0], [1, 0]])

    def test_n2_keeps_endpoints(self):
        r = spatial_resample(Stroke([[0, 0], [0.2, 0.8], [1, 0]]), 2)
        np.testing.assert_array_equal(r.points, [[0, 0], [1, 0]])

    def test_l_shape_against_dense_oracle(self):
        # unit L: down then right, total length 2
        s = Stroke([[0, 1], [0, 0], [1, 0]])
        r = spatial_resample(s, 5)
        # quarter-length stations: 0, 0.5, 1.0, 1.5, 2.0 along the L
        expected = [[0, 1], [0, 0.5], [0, 0], [0.5, 0], [1, 0]]
        np.testing.assert_allclose(r.points, expected, atol=1e-12)

    def test_arc_length_spacing_random(self, rng):
        s = random_stroke(rng, 12)
        r = spatial_resample(s, 30)
        seg = np.linalg.norm(np.diff(r.points, axis=0), axis=1)
        # equal spacing up to interpolation error at the corners
        assert seg.std() / seg.mean() < 0.5
        np.testing.assert_allclose(r.points[0], s.points[0])
        np.testing.assert_allclose(r.points[-1], s.points[-1])

    def test_degenerate_all_same_point(self):
        r = spatial_resample(Stroke([[1, 1], [1, 1]]), 4)
        assert len(r) == 4
        np.testing.assert_array_equal(r.points, np.ones((4, 2)))

    def test_validation(self):
        with pytest.raises(ValueError):
            spatial_resample(Stroke([[0, 0], [1, 1]]), 1)
        with pytest.raises(ValueError):
            spatial_resample(Stroke([[0, 0]]), 3)


class TestCurveParameter:
    def test_two_point_midpoint(self):
        s = Stroke([[0, 0], [1, 0]])
        np.testing.assert_allclose(curve_point(s, 0.5), [0.5, 0])

    def test_t1_is_last_point(self, rng):
        s = random_stroke(rng, 9)
        np.testing.assert_array_equal(curve_point(s, 1.0), s.points[-1])
        np.testing.assert_array_equal(curve_point(s, 0.0), s.points[0])

    def test_index_normalized_interior(self):
        # t=0.75 on 3 points: t*(T-1) = 1.5, halfway along the second segment
        s = Stroke([[0, 0], [1, 0], [1, 1]])
        np.testing.assert_allclose(curve_point(s, 0.75), [1, 0.5])

    def test_out_of_range_rejected(self):
        s = Stroke([[0, 0], [1, 0]])
        with pytest.raises(ValueError):
            curve_point(s, 1.5)
        with pytest.raises(ValueError):
            curve_point(s, -0.1)

    def test_single_point_constant(self):
        s = Stroke([[2, 3]])
        out = curve_points(s, np.array([0.0, 0.4, 1.0]))
        np.testing.assert_array_equal(out, [[2, 3]] * 3)

    def test_matches_segmentwise_oracle(self, rng):
        s = random_stroke(rng, 7)
        ts = rng.random(40)
        out = curve_points(s, ts)
        for t, p in zip(ts, out):
            pos = t * (len(s) - 1)
            i = min(int(np.floor(pos)), len(s) - 2)
            frac = pos - i
            ref = (1 - frac) * s.points[i] + frac * s.points[i + 1]
            np.testing.assert_allclose(p, ref, atol=1e-12)


class TestAugment:
    def test_all_skips_identity(self, rng):
        d = Drawing([Stroke([[0, 0], [1, 2]])])
        out = augment_drawing(d, AugmentParams(probability=0.0), rng)
        assert out is d

    def test_forced_scale_doubles(self, rng):
        p = AugmentParams(
            rotation_range=(0.0, 0.0),
            scale_range=(2.0, 2.0),
            shear_range=(0.0, 0.0),
            probability=1.0,
        )
        d = Drawing([Stroke([[1, 1], [2, -3]])])
        out = augment_drawing(d, p, rng)
        np.testing.assert_allclose(out.strokes[0].points, [[2, 2], [4, -6]])

    def test_forced_quarter_rotation(self, rng):
        p = AugmentParams(
            rotation_range=(np.pi / 2, np.pi / 2),
            scale_range=(1.0, 1.0),
            shear_range=(0.0, 0.0),
            probability=1.0,
        )
        d = Drawing([Stroke([[1, 0], [0, 2]])])
        out = augment_drawing(d, p, rng)
        np.testing.assert_allclose(out.strokes[0].points, [[0, 1], [-2, 0]], atol=1e-12)

    def test_forced_shear(self, rng):
        p = AugmentParams(
            rotation_range=(0.0, 0.0),
            scale_range=(1.0, 1.0),
            shear_range=(0.3, 0.3),
            probability=1.0,
        )
        d = Drawing([Stroke([[0, 1], [2, 2]])])
        out = augment_drawing(d, p, rng)
        # x picks up shear * y
        np.testing.assert_allclose(out.strokes[0].points, [[0.3, 1], [2.6, 2]])

    def test_start_positions_move_with_strokes(self, rng):
        p = AugmentParams(probability=1.0)
        d = Drawing([random_stroke(rng, 6), random_stroke(rng, 4)])
        out = augment_drawing(d, p, rng)
        np.testing.assert_array_equal(
            out.start_positions, np.stack([s.points[0] for s in out.strokes])
        )

    def test_probability_validated(self):
        with pytest.raises(ValueError):
            AugmentParams(probability=1.5)
        with pytest.raises(ValueError):
            AugmentParams(scale_range=(-1.0, 2.0))


class TestMakeBatch:
    def test_mask_rows(self):
        batch, mask = make_batch(
            [Stroke(np.zeros((3, 2))), Stroke(np.zeros((5, 2)))], max_len=5
        )
        assert batch.shape == (2, 5, 2)
        np.testing.assert_array_equal(mask[0], [True, True, True, False, False])
        np.testing.assert_array_equal(mask[1], [True] * 5)

    def test_equal_lengths_all_true(self, rng):
        strokes = [random_stroke(rng, 4) for _ in range(3)]
        batch, mask = make_batch(strokes, max_len=100)
        assert mask.all() and batch.shape == (3, 4, 2)

    def test_overlong_stroke_resampled(self, rng):
        s = random_stroke(rng, 300)
        batch, mask = make_batch([s], max_len=200)
        assert batch.shape == (1, 200, 2)
        assert mask.all()
        np.testing.assert_array_equal(batch[0], spatial_resample(s, 200).points)

    def test_padding_is_zero(self):
        batch, _ = make_batch(
            [Stroke(np.ones((2, 2))), Stroke(np.ones((4, 2)))], max_len=10
        )
        np.testing.assert_array_equal(batch[0, 2:], np.zeros((2, 2)))
