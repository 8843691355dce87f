import colorsys

import numpy as np
import pytest

from pap.pose_embed import EmbedStyle, default_palette, refine_box, refine_predictions, render_embedding
from pap.rng import Rng
from pap.types import BBox, FramePrediction, Image, Keypoint, PersonPrediction, Pose, PredictionSet, VideoPrediction
from pap.validation import ValidationError


def _pose(*points):
    return Pose(tuple(Keypoint(float(x), float(y), float(c)) for x, y, c in points))


def _reference_render(crop: Image, pose: Pose, style: EmbedStyle) -> np.ndarray:
    """Whole-image distance test plus saturating add, one keypoint at a time."""
    r = style.radius(crop.width, crop.height)
    out = crop.pixels.astype(np.int32)
    ys, xs = np.mgrid[0:crop.height, 0:crop.width]
    for i, kp in enumerate(pose.keypoints):
        if kp.confidence < style.conf_threshold:
            continue
        dx = xs + 0.5 - kp.x
        dy = ys + 0.5 - kp.y
        inside = dy * dy + dx * dx <= r * r
        out[inside] += np.array(style.palette[i])
    return np.minimum(out, 255).astype(np.uint8)


def test_palette_small_cases():
    assert default_palette(1) == [(255, 0, 0)]
    assert default_palette(2) == [(255, 0, 0), (0, 255, 255)]
    with pytest.raises(ValidationError):
        default_palette(0)


def test_palette_17_distinct_hues():
    palette = default_palette(17)
    assert len(set(palette)) == 17
    hues = [colorsys.rgb_to_hsv(*(c / 255 for c in color))[0] for color in palette]
    gaps = [b - a for a, b in zip(hues, hues[1:])]
    assert min(gaps) == pytest.approx(1 / 17, abs=0.01)


def test_style_validation():
    with pytest.raises(ValidationError):
        EmbedStyle(palette=((1, 2, 3), (1, 2, 3)))
    with pytest.raises(ValidationError):
        EmbedStyle.default(3, radius_min=0.5)
    with pytest.raises(ValidationError):
        EmbedStyle.default(3, radius_ratio=0.0)


def test_zero_confidence_is_identity():
    crop = Image(8, 6, np.arange(8 * 6 * 3, dtype=np.uint8).reshape(6, 8, 3))
    pose = _pose(*[(3, 3, 0.0)] * 17)
    assert render_embedding(crop, pose, EmbedStyle.default()) == crop


def test_single_green_disk_on_black():
    crop = Image.filled(11, 11, (0, 0, 0))
    style = EmbedStyle(palette=((0, 255, 0),), radius_ratio=0.01, radius_min=2.0)
    out = render_embedding(crop, _pose((5.5, 5.5, 1.0)), style)
    ys, xs = np.mgrid[0:11, 0:11]
    inside = (xs + 0.5 - 5.5) ** 2 + (ys + 0.5 - 5.5) ** 2 <= 4.0
    assert np.all(out.pixels[inside] == (0, 255, 0))
    assert np.all(out.pixels[~inside] == 0)
    assert inside.sum() == 13


def test_white_crop_saturates():
    crop = Image.filled(20, 20, (255, 255, 255))
    pose = _pose(*[(i, i, 1.0) for i in range(17)])
    assert render_embedding(crop, pose, EmbedStyle.default()) == crop


def test_dimension_mismatch():
    crop = Image(10, 10, np.zeros((9, 10, 3), dtype=np.uint8))
    with pytest.raises(ValidationError):
        render_embedding(crop, _pose((1, 1, 1.0)), EmbedStyle.default(1))


def test_render_matches_reference_on_random_cases():
    stream = Rng(99)
    for _ in range(100):
        w, h = stream.randint(4, 48), stream.randint(4, 48)
        pixels = np.array([stream.color() for _ in range(w * h)], dtype=np.uint8).reshape(h, w, 3)
        crop = Image(w, h, pixels)
        n = stream.randint(1, 17)
        pose = Pose(tuple(
            Keypoint(stream.uniform() * (w + 10) - 5, stream.uniform() * (h + 10) - 5, stream.uniform())
            for _ in range(n)
        ))
        style = EmbedStyle.default(n, radius_ratio=0.02 + 0.2 * stream.uniform(),
                                   radius_min=1.0 + 3 * stream.uniform(), conf_threshold=stream.uniform())
        out = render_embedding(crop, pose, style)
        assert np.array_equal(out.pixels, _reference_render(crop, pose, style))
        assert np.all(out.pixels >= crop.pixels)


def test_refine_fixed_point():
    box = BBox(0, 0, 50, 50)
    assert refine_box(box, _pose((10, 10, 0.9), (40, 40, 0.9))) == box


def test_refine_single_axis_expansion():
    out = refine_box(BBox(10, 10, 20, 20), _pose((25, 15, 0.9)), conf_threshold=0.5)
    assert out == BBox(10, 10, 25, 20)


def test_refine_without_qualifying_keypoints_adds_margin():
    out = refine_box(BBox(10, 10, 20, 20), _pose((90, 90, 0.1)), conf_threshold=0.5, margin=2)
    assert out == BBox(8, 8, 22, 22)


def test_refine_clips_to_bounds():
    out = refine_box(BBox(10, 10, 20, 20), _pose((200, 5, 1.0)), margin=20, bounds=(100, 80))
    assert out == BBox(0, 0, 100, 40)


def test_refine_clips_every_side_of_a_partly_outside_box():
    out = refine_box(BBox(90, 70, 130, 95), _pose((95, 75, 1.0)), bounds=(100, 80))
    assert out == BBox(90, 70, 100, 80)
    assert out.x_min < out.x_max and out.y_min < out.y_max


def test_refine_box_outside_bounds_is_rejected():
    with pytest.raises(ValidationError, match="Must overlap the image"):
        refine_box(BBox(150, 10, 160, 20), _pose((155, 15, 1.0)), bounds=(100, 80))


def _random_case(stream: Rng):
    x0, y0 = stream.uniform() * 200, stream.uniform() * 200
    box = BBox(x0, y0, x0 + 1 + stream.uniform() * 100, y0 + 1 + stream.uniform() * 100)
    pose = Pose(tuple(
        Keypoint(stream.uniform() * 400, stream.uniform() * 400, stream.uniform())
        for _ in range(stream.randint(1, 17))
    ))
    return box, pose


def test_refine_matches_min_max_oracle():
    stream = Rng(7)
    for _ in range(1000):
        box, pose = _random_case(stream)
        thr, margin = stream.uniform(), stream.uniform() * 5
        xs = [box.x_min, box.x_max] + [kp.x for kp in pose.keypoints if kp.confidence >= thr]
        ys = [box.y_min, box.y_max] + [kp.y for kp in pose.keypoints if kp.confidence >= thr]
        expected = BBox(max(0.0, min(xs) - margin), max(0.0, min(ys) - margin), max(xs) + margin, max(ys) + margin)
        assert refine_box(box, pose, thr, margin) == expected


def test_refine_properties():
    stream = Rng(8)
    for _ in range(1000):
        box, pose = _random_case(stream)
        thr = stream.uniform()
        once = refine_box(box, pose, thr)
        assert refine_box(once, pose, thr) == once
        assert once.area >= box.area
        lower = refine_box(box, pose, thr * stream.uniform())
        assert lower.x_min <= once.x_min and lower.y_min <= once.y_min
        assert lower.x_max >= once.x_max and lower.y_max >= once.y_max


def test_refine_predictions_only_touches_posed_persons():
    posed = PersonPrediction(BBox(10, 10, 20, 20), 0.9, (), _pose((30, 15, 1.0)))
    bare = PersonPrediction(BBox(40, 40, 50, 50), 0.8)
    predictions = PredictionSet((VideoPrediction("v", 0, 1.0, (FramePrediction(0, (posed, bare)),)),))
    refined = refine_predictions(predictions).videos[0].frames[0].persons
    assert refined[0].box == BBox(10, 10, 30, 20)
    assert refined[1] == bare
