"""
Seeded synthetic datasets and controlled-error predictions.

Generated data mirrors the statistical structure that matters for scoring:
several persons per frame, a stick-figure pose per person, ten part boxes
laid out from that figure, and long-tailed part states (per video action and
part group one modal state takes `state_skew` of the mass, the rest is
spread uniformly). Crops are flat-colored rectangles with one rectangle per
part; they exist only to feed the pose embedding.

Every video draws from its own stream derived from (seed, video index), so
videos can be generated in any order or in parallel. Labels use integer and
fixed-point draws only.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

from . import rng as prng
from .anno import dataset_to_dict, write_json
from .images import write_png
from .parallel import map_ordered
from .types import (
    BBox, FrameAnnotation, FramePrediction, Image, Keypoint, PartAnnotation,
    PartCategory, PartGroup, PartPrediction, PersonAnnotation, PersonPrediction,
    Pose, PredictionSet, VideoAnnotation, VideoPrediction, Vocabulary,
)
from .validation import (
    DEFAULT_KEYPOINT_COUNT, MAX_PERSONS_PER_FRAME, ValidationError,
    validate_confidence, validate_count, validate_positive,
)

logger = logging.getLogger(__name__)

# Stream keys for derive_seed; frozen with the rng algorithm
_MODES_KEY = 1
_VIDEO_KEY = 2
_CROP_KEY = 3
_CORRUPT_KEY = 4

# Canonical 17-keypoint stick figure, as fractions of the person box
CANONICAL_POSE = (
    (0.50, 0.08),  # nose
    (0.53, 0.06), (0.47, 0.06),  # eyes
    (0.56, 0.08), (0.44, 0.08),  # ears
    (0.65, 0.20), (0.35, 0.20),  # shoulders
    (0.72, 0.36), (0.28, 0.36),  # elbows
    (0.76, 0.50), (0.24, 0.50),  # wrists
    (0.60, 0.52), (0.40, 0.52),  # hips
    (0.62, 0.72), (0.38, 0.72),  # knees
    (0.63, 0.92), (0.37, 0.92),  # ankles
)

# Part silhouettes, as fractions of the person box (x0, y0, x1, y1)
PART_TEMPLATE = {
    PartCategory.HEAD: (0.38, 0.00, 0.62, 0.15),
    PartCategory.LEFT_ARM: (0.62, 0.17, 0.80, 0.44),
    PartCategory.RIGHT_ARM: (0.20, 0.17, 0.38, 0.44),
    PartCategory.LEFT_HAND: (0.70, 0.44, 0.84, 0.56),
    PartCategory.RIGHT_HAND: (0.16, 0.44, 0.30, 0.56),
    PartCategory.HIP: (0.35, 0.45, 0.65, 0.58),
    PartCategory.LEFT_LEG: (0.52, 0.56, 0.70, 0.88),
    PartCategory.RIGHT_LEG: (0.30, 0.56, 0.48, 0.88),
    PartCategory.LEFT_FOOT: (0.55, 0.88, 0.72, 1.00),
    PartCategory.RIGHT_FOOT: (0.28, 0.88, 0.45, 1.00),
}

MIN_PERSON_WIDTH = 20


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 1
    n_videos: int = 10
    frames_per_video: int = 9
    persons_per_frame: tuple[int, int] = (1, 3)
    image_size: tuple[int, int] = (640, 360)
    state_skew: float = 0.977
    keypoint_jitter: float = 2.0
    fps: float = 1.0
    n_keypoints: int = DEFAULT_KEYPOINT_COUNT
    render_crops: bool = True

    def __post_init__(self):
        validate_count(self.n_videos, "n_videos")
        validate_count(self.frames_per_video, "frames_per_video")
        lo, hi = self.persons_per_frame
        validate_count(lo, "persons_per_frame minimum")
        if not lo <= hi <= MAX_PERSONS_PER_FRAME:
            raise ValidationError(
                f"Invalid persons_per_frame {self.persons_per_frame}. Must satisfy 1 <= min <= max <= "
                f"{MAX_PERSONS_PER_FRAME}."
            )
        width, height = self.image_size
        validate_count(width, "image width", MIN_PERSON_WIDTH * 3)
        validate_count(height, "image height", MIN_PERSON_WIDTH * 3)
        if not 1 / 75 <= self.state_skew <= 1.0:
            raise ValidationError(f"Invalid state_skew '{self.state_skew}'. Must be in [1/75, 1].")
        if self.keypoint_jitter < 0:
            raise ValidationError(f"Invalid keypoint_jitter '{self.keypoint_jitter}'. Must be >= 0.")
        validate_positive(self.fps, "fps")
        if not 1 <= self.n_keypoints <= len(CANONICAL_POSE):
            raise ValidationError(f"Invalid n_keypoints '{self.n_keypoints}'. Must be 1..{len(CANONICAL_POSE)}.")


@dataclass(frozen=True)
class ErrorRates:
    """Per-channel corruption: flip probabilities and box jitter magnitude."""
    action_flip: float = 0.0
    box_jitter: float = 0.0  # max shift of each person-box edge, as a fraction of box size
    state_flip: float = 0.0

    def __post_init__(self):
        for name in ("action_flip", "box_jitter", "state_flip"):
            validate_confidence(getattr(self, name), field_name=name)


def modal_states(seed: int, vocab: Vocabulary) -> dict[tuple[int, PartGroup], int]:
    """The modal state of every (video action, part group) pair.

    Heads default to "none" for every action; the other groups draw their
    mode from the seeded stream.
    """
    stream = prng.Rng(prng.derive_seed(seed, _MODES_KEY))
    table = {}
    for action in range(len(vocab.video_actions)):
        for group in PartGroup:
            if group is PartGroup.HEAD:
                table[(action, group)] = 0
            else:
                table[(action, group)] = stream.below(len(vocab.part_states))
    return table


def _draw_state(stream: prng.Rng, modal: int, n_states: int, threshold: int) -> int:
    if n_states == 1 or stream.bernoulli(threshold):
        return modal
    other = stream.below(n_states - 1)
    return other if other < modal else other + 1


def _scale_box(person: BBox, frac: tuple[float, float, float, float]) -> BBox:
    w, h = person.width, person.height
    x0 = person.x_min + round(frac[0] * w)
    y0 = person.y_min + round(frac[1] * h)
    x1 = max(x0 + 1, person.x_min + round(frac[2] * w))
    y1 = max(y0 + 1, person.y_min + round(frac[3] * h))
    return BBox(float(x0), float(y0), float(x1), float(y1))


def _person_box(stream: prng.Rng, image_size: tuple[int, int]) -> BBox:
    width, height = image_size
    ph = stream.randint(max(MIN_PERSON_WIDTH * 2, height * 2 // 5), height * 9 // 10)
    pw = min(width, max(MIN_PERSON_WIDTH, stream.randint(ph * 3 // 10, ph // 2)))
    x0 = stream.randint(0, width - pw)
    y0 = stream.randint(0, height - ph)
    return BBox(float(x0), float(y0), float(x0 + pw), float(y0 + ph))


def _person_pose(stream: prng.Rng, box: BBox, cfg: SynthConfig) -> Pose:
    keypoints = []
    for fx, fy in CANONICAL_POSE[:cfg.n_keypoints]:
        jx = (2 * stream.uniform() - 1) * cfg.keypoint_jitter
        jy = (2 * stream.uniform() - 1) * cfg.keypoint_jitter
        conf = 0.5 + 0.5 * stream.uniform()
        keypoints.append(Keypoint(
            round(box.x_min + fx * box.width + jx, 2),
            round(box.y_min + fy * box.height + jy, 2),
            round(conf, 3),
        ))
    return Pose(tuple(keypoints))


def _generate_video(cfg: SynthConfig, vocab: Vocabulary, modes: dict, index: int) -> VideoAnnotation:
    stream = prng.Rng(prng.derive_seed(cfg.seed, _VIDEO_KEY, index))
    threshold = prng.probability_threshold(cfg.state_skew)
    n_states = len(vocab.part_states)
    action = stream.below(len(vocab.video_actions))
    frames = []
    for frame_idx in range(cfg.frames_per_video):
        persons = []
        for _ in range(stream.randint(*cfg.persons_per_frame)):
            box = _person_box(stream, cfg.image_size)
            parts = tuple(
                PartAnnotation(
                    category=category,
                    box=_scale_box(box, frac),
                    state=_draw_state(stream, modes[(action, category.group)], n_states, threshold),
                )
                for category, frac in PART_TEMPLATE.items()
            )
            persons.append(PersonAnnotation(box=box, parts=parts, pose=_person_pose(stream, box, cfg)))
        frames.append(FrameAnnotation(frame_idx=frame_idx, persons=tuple(persons)))
    return VideoAnnotation(
        video_id=f"synth_{index:05d}",
        action=action,
        fps=cfg.fps,
        duration_s=cfg.frames_per_video / cfg.fps,
        frames=tuple(frames),
    )


def render_crop(seed: int, video_index: int, frame_idx: int, person_index: int,
                person: PersonAnnotation) -> Image:
    """Flat background plus one flat rectangle per part, in crop coordinates."""
    stream = prng.Rng(prng.derive_seed(seed, _CROP_KEY, video_index, frame_idx, person_index))
    box = person.box
    width, height = int(box.width), int(box.height)
    image = Image.filled(width, height, stream.color())
    for part in person.parts:
        x0, y0 = int(part.box.x_min - box.x_min), int(part.box.y_min - box.y_min)
        x1, y1 = int(part.box.x_max - box.x_min), int(part.box.y_max - box.y_min)
        image.pixels[max(0, y0):min(height, y1), max(0, x0):min(width, x1)] = stream.color()
    return image


CropKey = tuple[str, int, int]  # (video_id, frame_idx, person_index)


def generate_dataset(cfg: SynthConfig, jobs: int = 1) -> tuple[Vocabulary, list[VideoAnnotation], dict[CropKey, Image]]:
    """Generate the vocabulary, annotated videos and (optionally) person crops."""
    vocab = Vocabulary.default()
    modes = modal_states(cfg.seed, vocab)
    videos = map_ordered(lambda i: _generate_video(cfg, vocab, modes, i), range(cfg.n_videos), jobs)
    crops: dict[CropKey, Image] = {}
    if cfg.render_crops:
        for v, video in enumerate(videos):
            for frame in video.frames:
                for p, person in enumerate(frame.persons):
                    crops[(video.video_id, frame.frame_idx, p)] = render_crop(cfg.seed, v, frame.frame_idx, p, person)
    logger.info(f"Generated {len(videos)} videos and {len(crops)} crops (seed={cfg.seed}, skew={cfg.state_skew})")
    return vocab, videos, crops


def crop_filename(key: CropKey) -> str:
    video_id, frame_idx, person_index = key
    return f"{video_id}_f{frame_idx:05d}_p{person_index:02d}.png"


def write_dataset(out_dir, vocab: Vocabulary, videos: list[VideoAnnotation],
                  crops: dict[CropKey, Image]) -> dict:
    """Write annotations.json, crops/*.png and crops/manifest.json.

    Manifest entries carry the person box and the pose shifted into the
    crop frame, which is what render-pose consumes.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(out_dir / "annotations.json", dataset_to_dict(vocab, videos))
    persons = {
        (video.video_id, frame.frame_idx, p): person
        for video in videos for frame in video.frames for p, person in enumerate(frame.persons)
    }
    entries = []
    if crops:
        crop_dir = out_dir / "crops"
        crop_dir.mkdir(exist_ok=True)
        for key in sorted(crops):
            name = crop_filename(key)
            write_png(crop_dir / name, crops[key])
            person = persons[key]
            pose = person.pose.shifted(-person.box.x_min, -person.box.y_min) if person.pose else None
            entries.append({
                "video_id": key[0],
                "frame_idx": key[1],
                "person_index": key[2],
                "file": name,
                "box": person.box.to_list(),
                "pose": pose.to_list() if pose else None,
            })
        write_json(crop_dir / "manifest.json", {"crops": entries})
    return {"videos": len(videos), "persons": len(persons), "crops": len(entries)}


# ===== CONTROLLED-ERROR PREDICTIONS =====

def _jitter_box(stream: prng.Rng, box: BBox, magnitude: float) -> BBox:
    if magnitude <= 0:
        return box
    dx, dy = magnitude * box.width, magnitude * box.height
    x0 = max(0.0, box.x_min + (2 * stream.uniform() - 1) * dx)
    y0 = max(0.0, box.y_min + (2 * stream.uniform() - 1) * dy)
    x1 = max(x0 + 1.0, box.x_max + (2 * stream.uniform() - 1) * dx)
    y1 = max(y0 + 1.0, box.y_max + (2 * stream.uniform() - 1) * dy)
    return BBox(x0, y0, x1, y1)


def _flip(stream: prng.Rng, value: int, n: int, threshold: int) -> int:
    if n < 2 or not stream.bernoulli(threshold):
        return value
    other = stream.below(n - 1)
    return other if other < value else other + 1


def corrupt_predictions(videos: list[VideoAnnotation], vocab: Vocabulary, rates: ErrorRates,
                        seed: int) -> PredictionSet:
    """Turn ground truth into predictions with configured error rates.

    With all rates 0 the result matches the ground truth exactly (every
    confidence 1.0). Frames with more than 10 persons keep the first 10.
    """
    action_threshold = prng.probability_threshold(rates.action_flip)
    state_threshold = prng.probability_threshold(rates.state_flip)
    n_actions, n_states = len(vocab.video_actions), len(vocab.part_states)
    out = []
    for v, video in enumerate(videos):
        stream = prng.Rng(prng.derive_seed(seed, _CORRUPT_KEY, v))
        action = _flip(stream, video.action, n_actions, action_threshold)
        frames = []
        for frame in video.frames:
            if len(frame.persons) > MAX_PERSONS_PER_FRAME:
                logger.warning(f"{video.video_id} frame {frame.frame_idx}: keeping first "
                               f"{MAX_PERSONS_PER_FRAME} of {len(frame.persons)} persons")
            persons = []
            for person in frame.persons[:MAX_PERSONS_PER_FRAME]:
                parts = tuple(
                    PartPrediction(
                        category=part.category,
                        box=part.box,
                        state=_flip(stream, part.state, n_states, state_threshold),
                        confidence=1.0,
                    )
                    for part in person.parts
                )
                persons.append(PersonPrediction(
                    box=_jitter_box(stream, person.box, rates.box_jitter),
                    confidence=1.0,
                    parts=parts,
                    pose=person.pose,
                ))
            frames.append(FramePrediction(frame_idx=frame.frame_idx, persons=tuple(persons)))
        out.append(VideoPrediction(video_id=video.video_id, action=action, confidence=1.0, frames=tuple(frames)))
    return PredictionSet(tuple(out))
