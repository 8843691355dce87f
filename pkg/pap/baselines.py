"""
Reference predictors and the coarse-to-fine prediction assembler.

The assembler is the last stage of the pipeline: it takes the video-level
action, detected persons, detected parts and segment pseudo labels, and
produces frame-level predictions in which each part's state is the modal
state of its group in the enclosing segment.
"""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

from .parallel import map_ordered
from .segmenter import DEFAULT_SEGMENT_DURATION, SegmentPseudoLabel, modal_state, tag_video
from .types import (
    BBox, FrameAnnotation, FramePrediction, PartCategory, PartGroup, PartPrediction,
    PersonAnnotation, PersonPrediction, Pose, PredictionSet, VideoAnnotation,
    VideoPrediction, Vocabulary,
)
from .validation import MAX_PERSONS_PER_FRAME, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModeEntry:
    state: int
    frequency: float


@dataclass(frozen=True)
class ModeTable:
    """(video action, part group) -> training-set modal state and its frequency."""
    entries: Mapping[tuple[int, PartGroup], ModeEntry]

    def lookup(self, action: int, group: PartGroup) -> ModeEntry:
        return self.entries.get((action, group), ModeEntry(0, 0.0))


def fit_mode_table(train: Sequence[VideoAnnotation], vocab: Vocabulary) -> ModeTable:
    """Modal state per (action, group) over all training part instances.

    Pairs never seen in training map to "none" with frequency 0.
    """
    if not train:
        raise ValidationError("Training set is empty")
    counts: dict[tuple[int, PartGroup], Counter] = defaultdict(Counter)
    for video in train:
        for frame in video.frames:
            for person in frame.persons:
                for part in person.parts:
                    counts[(video.action, part.group)][part.state] += 1
    entries = {}
    for action in range(len(vocab.video_actions)):
        for group in PartGroup:
            histogram = counts.get((action, group))
            if not histogram:
                entries[(action, group)] = ModeEntry(0, 0.0)
                continue
            state = modal_state(histogram)
            entries[(action, group)] = ModeEntry(state, histogram[state] / sum(histogram.values()))
    logger.info(f"Fitted mode table on {len(train)} videos ({len(counts)} observed action/group pairs)")
    return ModeTable(entries)


def strip_states(videos: Sequence[VideoAnnotation]) -> list[VideoAnnotation]:
    """Hide part states (all set to "none"), keeping boxes, actions and poses."""
    return [
        replace(video, frames=tuple(
            replace(frame, persons=tuple(
                replace(person, parts=tuple(replace(part, state=0) for part in person.parts))
                for person in frame.persons
            ))
            for frame in video.frames
        ))
        for video in videos
    ]


def _oracle_prediction(video: VideoAnnotation, state_of) -> VideoPrediction:
    frames = []
    for frame in video.frames:
        persons = []
        for person in frame.persons[:MAX_PERSONS_PER_FRAME]:
            parts = []
            for part in person.parts:
                state, confidence = state_of(video, part)
                parts.append(PartPrediction(part.category, part.box, state, confidence))
            persons.append(PersonPrediction(person.box, 1.0, tuple(parts), person.pose))
        frames.append(FramePrediction(frame.frame_idx, tuple(persons)))
    return VideoPrediction(video.video_id, video.action, 1.0, tuple(frames))


def predict_mode(table: ModeTable, structure: Sequence[VideoAnnotation]) -> PredictionSet:
    """Oracle boxes and actions; every part gets table[(action, group)]."""
    def state_of(video, part):
        entry = table.lookup(video.action, part.group)
        return entry.state, entry.frequency

    return PredictionSet(tuple(_oracle_prediction(video, state_of) for video in structure))


def predict_constant(state: int, structure: Sequence[VideoAnnotation]) -> PredictionSet:
    """Oracle boxes and actions; every part gets the same state."""
    return PredictionSet(tuple(_oracle_prediction(video, lambda v, p: (state, 1.0)) for video in structure))


# ===== ASSEMBLER =====

@dataclass(frozen=True)
class DetectedPart:
    category: PartCategory
    box: BBox
    confidence: float


@dataclass(frozen=True)
class DetectedPerson:
    box: BBox
    confidence: float
    parts: tuple[DetectedPart, ...] = ()
    pose: Optional[Pose] = None


@dataclass(frozen=True)
class VideoEvidence:
    """Outputs of the upstream stages for one video."""
    video_id: str
    action: int
    action_confidence: float
    frames: Mapping[int, Sequence[DetectedPerson]]


def _top_k(items, k: int):
    return sorted(items, key=lambda item: -item.confidence)[:k]


def _segment_lookup(video_id: str, labels: Sequence[SegmentPseudoLabel]):
    """(start, end, {group: label}) per segment, sorted by start frame."""
    by_range: dict[tuple[int, int], dict[PartGroup, SegmentPseudoLabel]] = defaultdict(dict)
    for label in labels:
        if label.segment.video_id != video_id:
            continue
        key = (label.segment.start_frame, label.segment.end_frame)
        if label.group in by_range[key]:
            raise ValidationError(
                f"Duplicate segment coverage: frames {key[0]}-{key[1]} of '{video_id}' "
                f"carry more than one '{label.group.value}' label"
            )
        by_range[key][label.group] = label
    return sorted((start, end, groups) for (start, end), groups in by_range.items())


def _enclosing(segments, frame_idx: int, video_id: str) -> dict[PartGroup, SegmentPseudoLabel]:
    covering = [groups for start, end, groups in segments if start <= frame_idx < end]
    if not covering:
        raise ValidationError(f"Frame {frame_idx} of '{video_id}' is not covered by any segment")
    if len(covering) > 1:
        raise ValidationError(f"Frame {frame_idx} of '{video_id}' is covered by {len(covering)} segments")
    return covering[0]


def assemble_video(evidence: VideoEvidence, labels: Sequence[SegmentPseudoLabel]) -> VideoPrediction:
    segments = _segment_lookup(evidence.video_id, labels)
    frames = []
    for frame_idx in sorted(evidence.frames):
        groups = _enclosing(segments, frame_idx, evidence.video_id)
        persons = []
        for person in _top_k(evidence.frames[frame_idx], MAX_PERSONS_PER_FRAME):
            parts = []
            for category in PartCategory:
                candidates = [part for part in person.parts if part.category is category]
                if not candidates:
                    continue
                best = _top_k(candidates, 1)[0]
                label = groups.get(category.group)
                if label is None:
                    raise ValidationError(
                        f"Frame {frame_idx} of '{evidence.video_id}' has no '{category.group.value}' segment label"
                    )
                parts.append(PartPrediction(category, best.box, label.modal_state, label.frequency))
            persons.append(PersonPrediction(person.box, person.confidence, tuple(parts), person.pose))
        frames.append(FramePrediction(frame_idx, tuple(persons)))
    return VideoPrediction(evidence.video_id, evidence.action, evidence.action_confidence, tuple(frames))


def assemble_predictions(evidence: Sequence[VideoEvidence], segment_labels: Sequence[SegmentPseudoLabel],
                         jobs: int = 1) -> PredictionSet:
    """Integrate video, person, part and segment outputs into frame-level predictions.

    Keeps the 10 most confident persons per frame and the most confident
    part per category per person (stable on ties).
    """
    videos = map_ordered(lambda ev: assemble_video(ev, segment_labels), evidence, jobs)
    return PredictionSet(tuple(videos))


def evidence_from_prediction(video: VideoPrediction) -> VideoEvidence:
    """Turn an assembled prediction back into assembler input."""
    return VideoEvidence(
        video_id=video.video_id,
        action=video.action,
        action_confidence=video.confidence,
        frames={
            frame.frame_idx: tuple(
                DetectedPerson(
                    box=person.box,
                    confidence=person.confidence,
                    parts=tuple(DetectedPart(p.category, p.box, p.confidence) for p in person.parts),
                    pose=person.pose,
                )
                for person in frame.persons
            )
            for frame in video.frames
        },
    )


def evidence_from_annotation(video: VideoAnnotation) -> VideoEvidence:
    """Oracle evidence: GT action, persons and part boxes, all with confidence 1.0."""
    return VideoEvidence(
        video_id=video.video_id,
        action=video.action,
        action_confidence=1.0,
        frames={frame.frame_idx: _detected(frame) for frame in video.frames},
    )


def _detected(frame: FrameAnnotation) -> tuple[DetectedPerson, ...]:
    def person_of(person: PersonAnnotation) -> DetectedPerson:
        parts = tuple(DetectedPart(part.category, part.box, 1.0) for part in person.parts)
        return DetectedPerson(person.box, 1.0, parts, person.pose)
    return tuple(person_of(person) for person in frame.persons)


def segment_oracle_predictions(videos: Sequence[VideoAnnotation], vocab: Vocabulary,
                               duration_s: float = DEFAULT_SEGMENT_DURATION, jobs: int = 1) -> PredictionSet:
    """Oracle boxes with ground-truth segment labels broadcast through the assembler."""
    labels = [label for video in videos for label in tag_video(video, vocab, duration_s)]
    return assemble_predictions([evidence_from_annotation(v) for v in videos], labels, jobs)
