"""
Pose-guided positional embedding and keypoint-driven box refinement.

The embedding composites one colored disk per confident keypoint onto a
person crop (crop pixel frame). A pixel belongs to a disk iff the distance
from its center (integer + 0.5) to the keypoint is <= r; there is no
anti-aliasing, so the output is bit-exact across platforms. Colors are
added channel-wise with saturation at 255, so pixels never get darker and
pixels outside every disk are untouched.
"""

import colorsys
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .images import validate_image
from .types import BBox, Image, Pose, PredictionSet
from .validation import DEFAULT_KEYPOINT_COUNT, ValidationError, validate_confidence

logger = logging.getLogger(__name__)

DEFAULT_RADIUS_RATIO = 0.02
DEFAULT_RADIUS_MIN = 2.0
DEFAULT_CONF_THRESHOLD = 0.3

Color = tuple[int, int, int]


def default_palette(n: int = DEFAULT_KEYPOINT_COUNT) -> list[Color]:
    """n fully saturated, full-value colors with hues evenly spaced at k/n."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValidationError(f"Invalid palette size '{n}'. Must be an integer >= 1.")
    palette = []
    for k in range(n):
        r, g, b = colorsys.hsv_to_rgb(k / n, 1.0, 1.0)
        palette.append((round(r * 255), round(g * 255), round(b * 255)))
    return palette


@dataclass(frozen=True)
class EmbedStyle:
    """Disk colors, radius policy and drawing threshold.

    radius = max(radius_min, radius_ratio * min(crop_w, crop_h)), shared by
    every keypoint; colors alone tell keypoints apart.
    """
    palette: tuple[Color, ...]
    radius_ratio: float = DEFAULT_RADIUS_RATIO
    radius_min: float = DEFAULT_RADIUS_MIN
    conf_threshold: float = DEFAULT_CONF_THRESHOLD

    def __post_init__(self):
        if len(set(self.palette)) != len(self.palette):
            raise ValidationError("Palette colors must be pairwise distinct")
        for color in self.palette:
            if len(color) != 3 or any(not 0 <= c <= 255 for c in color):
                raise ValidationError(f"Invalid palette color {color}. Must be three 0-255 samples.")
        if not self.radius_min >= 1:
            raise ValidationError(f"Invalid radius_min '{self.radius_min}'. Must be >= 1.")
        if not self.radius_ratio > 0:
            raise ValidationError(f"Invalid radius_ratio '{self.radius_ratio}'. Must be > 0.")
        validate_confidence(self.conf_threshold, field_name="conf_threshold")

    @classmethod
    def default(cls, n: int = DEFAULT_KEYPOINT_COUNT, **overrides) -> "EmbedStyle":
        return cls(palette=tuple(default_palette(n)), **overrides)

    def radius(self, width: int, height: int) -> float:
        return max(self.radius_min, self.radius_ratio * min(width, height))


def disk_mask(cx: float, cy: float, r: float, width: int, height: int):
    """In-bounds window (row slice, col slice) and boolean mask of a disk.

    Returns None when the disk has no pixel inside the image.
    """
    x0 = max(0, math.floor(cx - r - 0.5))
    x1 = min(width, math.ceil(cx + r + 0.5))
    y0 = max(0, math.floor(cy - r - 0.5))
    y1 = min(height, math.ceil(cy + r + 0.5))
    if x0 >= x1 or y0 >= y1:
        return None
    dx = np.arange(x0, x1, dtype=np.float64) + 0.5 - cx
    dy = np.arange(y0, y1, dtype=np.float64) + 0.5 - cy
    mask = (dy * dy)[:, None] + (dx * dx)[None, :] <= r * r
    return slice(y0, y1), slice(x0, x1), mask


def render_embedding(crop: Image, pose: Pose, style: EmbedStyle) -> Image:
    """X' = X + G(K): saturating-add a palette-colored disk per confident keypoint."""
    validate_image(crop)
    if pose.n > len(style.palette):
        raise ValidationError(f"Palette has {len(style.palette)} colors but pose has {pose.n} keypoints")
    r = style.radius(crop.width, crop.height)
    acc = crop.pixels.astype(np.uint16)
    drawn = 0
    # ascending keypoint order; the result does not depend on it under saturation
    for i, kp in pose.visible(style.conf_threshold):
        window = disk_mask(kp.x, kp.y, r, crop.width, crop.height)
        if window is None:
            continue
        rows, cols, mask = window
        acc[rows, cols][mask] += np.asarray(style.palette[i], dtype=np.uint16)
        drawn += 1
    logger.debug(f"Rendered {drawn}/{pose.n} keypoint disks with radius {r:.2f}")
    return Image(crop.width, crop.height, np.minimum(acc, 255).astype(np.uint8))


def refine_box(box: BBox, pose: Optional[Pose], conf_threshold: float = DEFAULT_CONF_THRESHOLD,
               margin: float = 0.0, bounds: Optional[tuple[float, float]] = None) -> BBox:
    """Grow a person box until every confident keypoint is inside.

    The result is the smallest box holding the input box and all keypoints
    with confidence >= conf_threshold, expanded by `margin` on each side,
    clipped to the image origin and, when given, to bounds = (width, height).
    All four sides are clipped; a box left empty by clipping is an error.
    """
    xs = [box.x_min, box.x_max]
    ys = [box.y_min, box.y_max]
    if pose is not None:
        for _, kp in pose.visible(conf_threshold):
            xs.append(kp.x)
            ys.append(kp.y)
    x_min, y_min = max(0.0, min(xs) - margin), max(0.0, min(ys) - margin)
    x_max, y_max = max(0.0, max(xs) + margin), max(0.0, max(ys) + margin)
    if bounds is not None:
        width, height = float(bounds[0]), float(bounds[1])
        x_min, x_max = min(width, x_min), min(width, x_max)
        y_min, y_max = min(height, y_min), min(height, y_max)
    if not (x_min < x_max and y_min < y_max):
        raise ValidationError(
            f"Invalid box {box.to_list()} for bounds {list(bounds) if bounds else None}. "
            "Must overlap the image after refinement."
        )
    return BBox(x_min, y_min, x_max, y_max)


def refine_predictions(predictions: PredictionSet, conf_threshold: float = DEFAULT_CONF_THRESHOLD,
                       margin: float = 0.0, bounds: Optional[tuple[float, float]] = None) -> PredictionSet:
    """Apply refine_box to every predicted person that carries a pose."""
    refined = 0
    videos = []
    for video in predictions.videos:
        frames = []
        for frame in video.frames:
            persons = []
            for person in frame.persons:
                if person.pose is not None:
                    new_box = refine_box(person.box, person.pose, conf_threshold, margin, bounds)
                    if new_box != person.box:
                        refined += 1
                    person = replace(person, box=new_box)
                persons.append(person)
            frames.append(replace(frame, persons=tuple(persons)))
        videos.append(replace(video, frames=tuple(frames)))
    logger.info(f"Refined {refined} person boxes")
    return PredictionSet(tuple(videos))
