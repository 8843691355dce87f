"""
Annotation and prediction file formats.

One self-describing JSON document per dataset: the vocabularies are embedded
and every category/state/action field is a name resolved against them.
Structure is checked with JSON Schema first, then the model invariants
(box geometry, unique frames, one part per category, ...) are checked while
the frozen model is built. Every error carries a JSON pointer.

Interactive-object entries and other unknown keys are accepted and ignored.
"""

import codecs
import json
import logging
from pathlib import Path
from typing import Any, Optional

from jsonschema import Draft202012Validator

from .types import (
    BBox, FrameAnnotation, FramePrediction, Keypoint, PartAnnotation, PartCategory,
    PartPrediction, PersonAnnotation, PersonPrediction, Pose, PredictionSet,
    VideoAnnotation, VideoPrediction, Vocabulary,
)
from .validation import (
    MAX_PERSONS_PER_FRAME, ValidationError, json_pointer, validate_box,
    validate_confidence, validate_finite, validate_part_category,
    validate_vocabulary_names,
)

logger = logging.getLogger(__name__)


# ===== SCHEMAS =====

_BOX = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}
_CONFIDENCE = {"type": "number", "minimum": 0, "maximum": 1}
_POSE = {
    "anyOf": [
        {"type": "null"},
        {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
        },
    ]
}
_VOCAB = {
    "type": "object",
    "required": ["video_actions", "part_states"],
    "properties": {
        "video_actions": {"type": "array", "items": {"type": "string"}},
        "part_states": {"type": "array", "items": {"type": "string"}},
    },
}


def _frames_schema(person: dict) -> dict:
    return {
        "type": "array",
        "items": {
            "type": "object",
            "required": ["frame_idx", "persons"],
            "properties": {
                "frame_idx": {"type": "integer", "minimum": 0},
                "persons": {"type": "array", "items": person},
            },
        },
    }


ANNOTATION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["vocab", "videos"],
    "properties": {
        "vocab": _VOCAB,
        "videos": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["video_id", "action", "fps", "duration_s", "frames"],
                "properties": {
                    "video_id": {"type": "string", "minLength": 1},
                    "action": {"type": "string"},
                    "fps": {"type": "number", "exclusiveMinimum": 0},
                    "duration_s": {"type": "number", "exclusiveMinimum": 0},
                    "frames": _frames_schema({
                        "type": "object",
                        "required": ["box", "parts"],
                        "properties": {
                            "box": _BOX,
                            "pose": _POSE,
                            "parts": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["category", "box", "state"],
                                    "properties": {
                                        "category": {"type": "string"},
                                        "box": _BOX,
                                        "state": {"type": "string"},
                                    },
                                },
                            },
                        },
                    }),
                },
            },
        },
    },
}

PREDICTION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["videos"],
    "properties": {
        "vocab": _VOCAB,
        "videos": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["video_id", "action", "confidence", "frames"],
                "properties": {
                    "video_id": {"type": "string", "minLength": 1},
                    "action": {"type": "string"},
                    "confidence": _CONFIDENCE,
                    "frames": _frames_schema({
                        "type": "object",
                        "required": ["box", "confidence", "parts"],
                        "properties": {
                            "box": _BOX,
                            "confidence": _CONFIDENCE,
                            "pose": _POSE,
                            "parts": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["category", "box", "state", "confidence"],
                                    "properties": {
                                        "category": {"type": "string"},
                                        "box": _BOX,
                                        "state": {"type": "string"},
                                        "confidence": _CONFIDENCE,
                                    },
                                },
                            },
                        },
                    }),
                },
            },
        },
    },
}

_annotation_validator = Draft202012Validator(ANNOTATION_SCHEMA)
_prediction_validator = Draft202012Validator(PREDICTION_SCHEMA)


# ===== LOW-LEVEL HELPERS =====

def _reject_constant(name: str):
    raise ValidationError(f"Invalid number '{name}'. Must be finite.")


def read_json(path) -> Any:
    """Read a UTF-8 (no BOM) JSON file; OSError propagates."""
    raw = Path(path).read_bytes()
    if raw.startswith(codecs.BOM_UTF8):
        raise ValidationError(f"File '{path}' must be UTF-8 without a byte-order mark")
    try:
        return json.loads(raw.decode("utf-8"), parse_constant=_reject_constant)
    except UnicodeDecodeError as e:
        raise ValidationError(f"File '{path}' is not valid UTF-8: {e.reason}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"Malformed JSON in '{path}': {e.msg} (line {e.lineno}, column {e.colno})") from None


def to_json_text(doc: Any) -> str:
    """Canonical text form: stable key order, 2-space indent, trailing newline."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_json(path, doc: Any) -> None:
    Path(path).write_text(to_json_text(doc), encoding="utf-8")


def _check_schema(validator: Draft202012Validator, doc: Any) -> None:
    errors = [(json_pointer(*e.absolute_path), e.message) for e in validator.iter_errors(doc)]
    if errors:
        errors.sort()
        path, message = errors[0]
        raise ValidationError(f"Schema violation: {message}", path, errors)


def _box(raw, path: str) -> BBox:
    return BBox(*validate_box(raw, path))


def _pose(raw, path: str, widths: dict) -> Optional[Pose]:
    if raw is None:
        return None
    keypoints = []
    for i, (x, y, conf) in enumerate(raw):
        kp_path = f"{path}/{i}"
        keypoints.append(Keypoint(
            validate_finite(x, "keypoint x", kp_path),
            validate_finite(y, "keypoint y", kp_path),
            validate_confidence(conf, kp_path, "keypoint confidence"),
        ))
    n = widths.setdefault("n", len(keypoints))
    if len(keypoints) != n:
        raise ValidationError(f"Pose has {len(keypoints)} keypoints, expected {n}", path)
    return Pose(tuple(keypoints))


def _category(raw: str, path: str) -> PartCategory:
    return PartCategory(validate_part_category(raw, path))


def _check_duplicate_category(seen: set, category: PartCategory, person_path: str, part_path: str) -> None:
    if category in seen:
        raise ValidationError(
            f"Duplicate part category '{category.value}' for person {person_path}", part_path
        )
    seen.add(category)


def _check_frame_order(frame_indices: list[int], video_path: str, num_frames: Optional[int]) -> None:
    for j, idx in enumerate(frame_indices):
        path = f"{video_path}/frames/{j}"
        if j and idx <= frame_indices[j - 1]:
            if idx == frame_indices[j - 1]:
                raise ValidationError(f"Duplicate frame_idx {idx}", path)
            raise ValidationError(f"Frames must be sorted by frame_idx ({idx} after {frame_indices[j - 1]})", path)
        if num_frames is not None and idx >= num_frames:
            raise ValidationError(
                f"Invalid frame_idx {idx}. Must be < ceil(fps * duration_s) = {num_frames}", path
            )


def vocabulary_from_dict(raw: dict) -> Vocabulary:
    video_actions = list(raw["video_actions"])
    part_states = list(raw["part_states"])
    validate_vocabulary_names(video_actions, part_states)
    return Vocabulary(tuple(video_actions), tuple(part_states))


# ===== ANNOTATIONS =====

def dataset_from_dict(doc: Any) -> tuple[Vocabulary, list[VideoAnnotation]]:
    """Validate a decoded annotation document and build the model."""
    _check_schema(_annotation_validator, doc)
    vocab = vocabulary_from_dict(doc["vocab"])
    widths: dict = {}
    videos = []
    seen_ids = set()
    for v, raw_video in enumerate(doc["videos"]):
        vpath = json_pointer("videos", v)
        video_id = raw_video["video_id"]
        if video_id in seen_ids:
            raise ValidationError(f"Duplicate video_id '{video_id}'", f"{vpath}/video_id")
        seen_ids.add(video_id)
        action = vocab.action_id(raw_video["action"], f"{vpath}/action")
        fps = float(raw_video["fps"])
        duration_s = float(raw_video["duration_s"])
        frames = []
        for f, raw_frame in enumerate(raw_video["frames"]):
            fpath = f"{vpath}/frames/{f}"
            persons = []
            for p, raw_person in enumerate(raw_frame["persons"]):
                ppath = f"{fpath}/persons/{p}"
                parts = []
                seen = set()
                for k, raw_part in enumerate(raw_person["parts"]):
                    kpath = f"{ppath}/parts/{k}"
                    category = _category(raw_part["category"], f"{kpath}/category")
                    _check_duplicate_category(seen, category, ppath, kpath)
                    parts.append(PartAnnotation(
                        category=category,
                        box=_box(raw_part["box"], f"{kpath}/box"),
                        state=vocab.state_id(raw_part["state"], f"{kpath}/state"),
                    ))
                persons.append(PersonAnnotation(
                    box=_box(raw_person["box"], f"{ppath}/box"),
                    parts=tuple(parts),
                    pose=_pose(raw_person.get("pose"), f"{ppath}/pose", widths),
                ))
            # the schema accepts 1.0 as an integer
            frames.append(FrameAnnotation(frame_idx=int(raw_frame["frame_idx"]), persons=tuple(persons)))
        video = VideoAnnotation(
            video_id=video_id, action=action, fps=fps, duration_s=duration_s, frames=tuple(frames)
        )
        _check_frame_order([fr.frame_idx for fr in frames], vpath, video.num_frames)
        videos.append(video)
    logger.debug(f"Parsed {len(videos)} videos against {len(vocab.part_states)} part states")
    return vocab, videos


def parse_dataset(path) -> tuple[Vocabulary, list[VideoAnnotation]]:
    """Read and validate an annotation JSON file."""
    return dataset_from_dict(read_json(path))


def dataset_to_dict(vocab: Vocabulary, videos: list[VideoAnnotation]) -> dict:
    """Serialize the model to the annotation document shape."""
    return {
        "vocab": vocab.to_dict(),
        "videos": [
            {
                "video_id": video.video_id,
                "action": vocab.video_actions[video.action],
                "fps": video.fps,
                "duration_s": video.duration_s,
                "frames": [
                    {
                        "frame_idx": frame.frame_idx,
                        "persons": [
                            {
                                "box": person.box.to_list(),
                                "pose": person.pose.to_list() if person.pose else None,
                                "parts": [
                                    {
                                        "category": part.category.value,
                                        "box": part.box.to_list(),
                                        "state": vocab.part_states[part.state],
                                    }
                                    for part in person.parts
                                ],
                            }
                            for person in frame.persons
                        ],
                    }
                    for frame in video.frames
                ],
            }
            for video in videos
        ],
    }


# ===== PREDICTIONS =====

def predictions_from_dict(doc: Any, vocab: Vocabulary) -> PredictionSet:
    """Validate a decoded prediction document against `vocab`."""
    _check_schema(_prediction_validator, doc)
    if "vocab" in doc and vocabulary_from_dict(doc["vocab"]) != vocab:
        raise ValidationError("Embedded vocabulary does not match the annotation vocabulary", "/vocab")
    widths: dict = {}
    videos = []
    seen_ids = set()
    for v, raw_video in enumerate(doc["videos"]):
        vpath = json_pointer("videos", v)
        video_id = raw_video["video_id"]
        if video_id in seen_ids:
            raise ValidationError(f"Duplicate video_id '{video_id}'", f"{vpath}/video_id")
        seen_ids.add(video_id)
        frames = []
        for f, raw_frame in enumerate(raw_video["frames"]):
            fpath = f"{vpath}/frames/{f}"
            if len(raw_frame["persons"]) > MAX_PERSONS_PER_FRAME:
                raise ValidationError(
                    f"Frame has {len(raw_frame['persons'])} persons. At most {MAX_PERSONS_PER_FRAME} allowed.",
                    f"{fpath}/persons",
                )
            persons = []
            for p, raw_person in enumerate(raw_frame["persons"]):
                ppath = f"{fpath}/persons/{p}"
                parts = []
                seen = set()
                for k, raw_part in enumerate(raw_person["parts"]):
                    kpath = f"{ppath}/parts/{k}"
                    category = _category(raw_part["category"], f"{kpath}/category")
                    _check_duplicate_category(seen, category, ppath, kpath)
                    parts.append(PartPrediction(
                        category=category,
                        box=_box(raw_part["box"], f"{kpath}/box"),
                        state=vocab.state_id(raw_part["state"], f"{kpath}/state"),
                        confidence=float(raw_part["confidence"]),
                    ))
                persons.append(PersonPrediction(
                    box=_box(raw_person["box"], f"{ppath}/box"),
                    confidence=float(raw_person["confidence"]),
                    parts=tuple(parts),
                    pose=_pose(raw_person.get("pose"), f"{ppath}/pose", widths),
                ))
            # the schema accepts 1.0 as an integer
            frames.append(FramePrediction(frame_idx=int(raw_frame["frame_idx"]), persons=tuple(persons)))
        _check_frame_order([fr.frame_idx for fr in frames], vpath, None)
        videos.append(VideoPrediction(
            video_id=video_id,
            action=vocab.action_id(raw_video["action"], f"{vpath}/action"),
            confidence=float(raw_video["confidence"]),
            frames=tuple(frames),
        ))
    return PredictionSet(tuple(videos))


def parse_predictions(path, vocab: Vocabulary) -> PredictionSet:
    """Read and validate a prediction JSON file."""
    return predictions_from_dict(read_json(path), vocab)


def predictions_to_dict(predictions: PredictionSet, vocab: Vocabulary) -> dict:
    """Serialize a PredictionSet to the prediction document shape."""
    return {
        "videos": [
            {
                "video_id": video.video_id,
                "action": vocab.video_actions[video.action],
                "confidence": video.confidence,
                "frames": [
                    {
                        "frame_idx": frame.frame_idx,
                        "persons": [
                            {
                                "box": person.box.to_list(),
                                "confidence": person.confidence,
                                "pose": person.pose.to_list() if person.pose else None,
                                "parts": [
                                    {
                                        "category": part.category.value,
                                        "box": part.box.to_list(),
                                        "state": vocab.part_states[part.state],
                                        "confidence": part.confidence,
                                    }
                                    for part in person.parts
                                ],
                            }
                            for person in frame.persons
                        ],
                    }
                    for frame in video.frames
                ],
            }
            for video in predictions.videos
        ],
    }
