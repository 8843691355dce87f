"""
Shared types for part-level action parsing.

This module defines the contract between:
- Annotation/prediction parsing (pap.anno)
- Synthetic generation (pap.synth)
- Segment tagging, pose embedding, scoring and baselines
- CLI commands (commands/*)

All records are frozen dataclasses; collections are tuples so models can be
shared between workers without copying.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np

from .validation import NONE_STATE, ValidationError


class PartCategory(str, Enum):
    """One of the 10 annotated body parts."""
    HEAD = "head"
    LEFT_ARM = "left_arm"
    RIGHT_ARM = "right_arm"
    LEFT_HAND = "left_hand"
    RIGHT_HAND = "right_hand"
    HIP = "hip"
    LEFT_LEG = "left_leg"
    RIGHT_LEG = "right_leg"
    LEFT_FOOT = "left_foot"
    RIGHT_FOOT = "right_foot"

    @property
    def group(self) -> "PartGroup":
        return PART_GROUP_OF[self]


class PartGroup(str, Enum):
    """Coarse body region; left/right categories share one group."""
    HEAD = "head"
    ARM = "arm"
    HAND = "hand"
    HIP = "hip"
    LEG = "leg"
    FOOT = "foot"


PART_GROUP_OF: dict[PartCategory, PartGroup] = {
    PartCategory.HEAD: PartGroup.HEAD,
    PartCategory.LEFT_ARM: PartGroup.ARM,
    PartCategory.RIGHT_ARM: PartGroup.ARM,
    PartCategory.LEFT_HAND: PartGroup.HAND,
    PartCategory.RIGHT_HAND: PartGroup.HAND,
    PartCategory.HIP: PartGroup.HIP,
    PartCategory.LEFT_LEG: PartGroup.LEG,
    PartCategory.RIGHT_LEG: PartGroup.LEG,
    PartCategory.LEFT_FOOT: PartGroup.FOOT,
    PartCategory.RIGHT_FOOT: PartGroup.FOOT,
}


@dataclass(frozen=True)
class BBox:
    """Corner-form pixel box, origin top-left."""
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    def to_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]


@dataclass(frozen=True)
class Keypoint:
    x: float
    y: float
    confidence: float


@dataclass(frozen=True)
class Pose:
    """Fixed-length keypoint array (N = len(keypoints))."""
    keypoints: tuple[Keypoint, ...]

    @property
    def n(self) -> int:
        return len(self.keypoints)

    def visible(self, conf_threshold: float) -> list[tuple[int, Keypoint]]:
        """Keypoints at or above the confidence threshold, with their index."""
        return [(i, kp) for i, kp in enumerate(self.keypoints) if kp.confidence >= conf_threshold]

    def shifted(self, dx: float, dy: float) -> "Pose":
        """Translate every keypoint, e.g. from frame to crop coordinates."""
        return Pose(tuple(Keypoint(kp.x + dx, kp.y + dy, kp.confidence) for kp in self.keypoints))

    def to_list(self) -> list[list[float]]:
        return [[kp.x, kp.y, kp.confidence] for kp in self.keypoints]


@dataclass(frozen=True)
class PartAnnotation:
    category: PartCategory
    box: BBox
    state: int  # index into Vocabulary.part_states, 0 = "none"

    @property
    def group(self) -> PartGroup:
        return PART_GROUP_OF[self.category]


@dataclass(frozen=True)
class PersonAnnotation:
    box: BBox
    parts: tuple[PartAnnotation, ...] = ()
    pose: Optional[Pose] = None


@dataclass(frozen=True)
class FrameAnnotation:
    frame_idx: int
    persons: tuple[PersonAnnotation, ...] = ()


def frame_count(fps: float, duration_s: float) -> int:
    """Number of frame slots in a video: ceil(fps * duration)."""
    return max(1, math.ceil(round(fps * duration_s, 9)))


@dataclass(frozen=True)
class VideoAnnotation:
    video_id: str
    action: int  # index into Vocabulary.video_actions
    fps: float
    duration_s: float
    frames: tuple[FrameAnnotation, ...] = ()

    @property
    def num_frames(self) -> int:
        return frame_count(self.fps, self.duration_s)


DEFAULT_VIDEO_ACTIONS = (
    "clean_and_jerk", "hurling_sport", "dribbling_basketball", "shooting_basketball",
    "high_jump", "long_jump", "javelin_throw", "shot_put", "hammer_throw",
    "pole_vault", "push_up", "pull_ups", "squat", "deadlifting", "bench_pressing",
    "front_raises", "lunge", "jumping_jacks", "skipping_rope", "tai_chi",
    "playing_tennis", "golf_driving", "kicking_soccer_ball", "throwing_discus",
)

DEFAULT_PART_STATES = (
    NONE_STATE,
    # head
    "nod", "shake", "look_up", "look_down", "turn_left", "turn_right", "tilt",
    "bow", "raise_head", "lower_head", "look_at_object", "shout",
    # arm
    "raise", "lower", "swing", "bend", "stretch", "push", "pull", "lift",
    "throw", "wave", "circle", "extend_forward", "extend_sideways", "fold",
    "carry", "support",
    # hand
    "hold", "grab", "release", "clap", "point", "punch", "catch", "dribble",
    "shoot", "press", "clench", "open_palm", "touch", "rotate_wrist",
    # hip
    "twist", "bend_forward", "bend_backward", "sway", "squat_down", "stand_up",
    "rotate", "thrust", "sit", "lean",
    # leg
    "step", "run", "jump", "kick", "kneel", "lunge_forward", "lift_knee",
    "straddle", "cross", "bend_knee", "straighten", "hop",
    # foot
    "stamp", "tiptoe", "slide", "take_off", "land", "balance", "kick_ball",
    "push_off", "drag", "tap",
)


@dataclass(frozen=True)
class Vocabulary:
    """Ordered name tables; list position is the id used everywhere else."""
    video_actions: tuple[str, ...]
    part_states: tuple[str, ...]

    @classmethod
    def default(cls) -> "Vocabulary":
        """24 video actions and "none" + 74 part states."""
        return cls(DEFAULT_VIDEO_ACTIONS, DEFAULT_PART_STATES)

    @cached_property
    def _action_ids(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.video_actions)}

    @cached_property
    def _state_ids(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.part_states)}

    def action_id(self, name: str, path: str = "") -> int:
        try:
            return self._action_ids[name]
        except (KeyError, TypeError):
            raise ValidationError(f"Unknown video action '{name}'", path) from None

    def state_id(self, name: str, path: str = "") -> int:
        try:
            return self._state_ids[name]
        except (KeyError, TypeError):
            raise ValidationError(f"Unknown part state '{name}'", path) from None

    def to_dict(self) -> dict:
        return {"video_actions": list(self.video_actions), "part_states": list(self.part_states)}


# ===== PREDICTIONS =====

@dataclass(frozen=True)
class PartPrediction:
    category: PartCategory
    box: BBox
    state: int
    confidence: float

    @property
    def group(self) -> PartGroup:
        return PART_GROUP_OF[self.category]


@dataclass(frozen=True)
class PersonPrediction:
    box: BBox
    confidence: float
    parts: tuple[PartPrediction, ...] = ()
    pose: Optional[Pose] = None


@dataclass(frozen=True)
class FramePrediction:
    frame_idx: int
    persons: tuple[PersonPrediction, ...] = ()


@dataclass(frozen=True)
class VideoPrediction:
    video_id: str
    action: int
    confidence: float
    frames: tuple[FramePrediction, ...] = ()

    @cached_property
    def by_frame(self) -> dict[int, FramePrediction]:
        return {f.frame_idx: f for f in self.frames}


@dataclass(frozen=True)
class PredictionSet:
    videos: tuple[VideoPrediction, ...] = ()

    @cached_property
    def by_video(self) -> dict[str, VideoPrediction]:
        return {v.video_id: v for v in self.videos}

    def get(self, video_id: str) -> Optional[VideoPrediction]:
        return self.by_video.get(video_id)


# ===== IMAGES =====

@dataclass(frozen=True, eq=False)
class Image:
    """8-bit RGB raster, row-major, pixels shaped (height, width, 3)."""
    width: int
    height: int
    pixels: np.ndarray = field(repr=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and np.array_equal(self.pixels, other.pixels))

    @classmethod
    def filled(cls, width: int, height: int, color: tuple[int, int, int]) -> "Image":
        pixels = np.empty((height, width, 3), dtype=np.uint8)
        pixels[:, :] = color
        return cls(width, height, pixels)
