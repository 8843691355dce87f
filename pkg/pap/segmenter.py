"""
Fixed-duration video segments and their six part-group pseudo labels.

A segment label is (video action, part group, modal state of that group over
every part instance of every person in every frame of the segment), written
as "(<action>) <group>: <state>". Left and right parts pool into one group.
Ties go to the lowest state id, so a tie with "none" resolves to "none";
a group with no instances is labeled "none".
"""

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass

from .anno import read_json
from .types import PartGroup, VideoAnnotation, Vocabulary
from .validation import ValidationError, json_pointer, validate_part_group, validate_positive

logger = logging.getLogger(__name__)

DEFAULT_SEGMENT_DURATION = 3.0

COMPOSITE_RE = re.compile(r"^\((?P<action>[^()]+)\) (?P<group>[a-z]+): (?P<state>.+)$")


@dataclass(frozen=True)
class Segment:
    """Half-open frame range [start_frame, end_frame) of one video."""
    video_id: str
    start_frame: int
    end_frame: int
    duration_s: float

    @property
    def num_frames(self) -> int:
        return self.end_frame - self.start_frame

    def covers(self, frame_idx: int) -> bool:
        return self.start_frame <= frame_idx < self.end_frame


@dataclass(frozen=True)
class SegmentPseudoLabel:
    segment: Segment
    group: PartGroup
    video_action: int
    modal_state: int
    frequency: float  # modal fraction of the group within the segment

    def composite(self, vocab: Vocabulary) -> str:
        return composite_label(vocab, self.video_action, self.group, self.modal_state)

    def to_record(self, vocab: Vocabulary) -> dict:
        return {
            "video_id": self.segment.video_id,
            "start_frame": self.segment.start_frame,
            "end_frame": self.segment.end_frame,
            "group": self.group.value,
            "composite": self.composite(vocab),
            "frequency": self.frequency,
        }


def composite_label(vocab: Vocabulary, action: int, group: PartGroup, state: int) -> str:
    return f"({vocab.video_actions[action]}) {group.value}: {vocab.part_states[state]}"


def segment_length(duration_s: float, fps: float) -> int:
    """Frames per segment: duration * fps rounded half-up, at least 1."""
    return max(1, math.floor(duration_s * fps + 0.5))


def split_segments(video: VideoAnnotation, duration_s: float = DEFAULT_SEGMENT_DURATION) -> list[Segment]:
    """Cut [0, ceil(fps * duration)) into contiguous segments; the last may be shorter."""
    validate_positive(duration_s, "segment duration")
    if not video.frames:
        raise ValidationError(f"Video '{video.video_id}' has no annotated frames to segment")
    length = segment_length(duration_s, video.fps)
    total = max(video.num_frames, video.frames[-1].frame_idx + 1)
    return [
        Segment(video.video_id, start, min(start + length, total), (min(start + length, total) - start) / video.fps)
        for start in range(0, total, length)
    ]


def _check_segment(video: VideoAnnotation, seg: Segment) -> None:
    if seg.video_id != video.video_id:
        raise ValidationError(f"Segment belongs to '{seg.video_id}', not '{video.video_id}'")
    if not 0 <= seg.start_frame < seg.end_frame:
        raise ValidationError(f"Segment [{seg.start_frame}, {seg.end_frame}) is empty or negative")
    if seg.end_frame > max(video.num_frames, (video.frames[-1].frame_idx + 1) if video.frames else 0):
        raise ValidationError(
            f"Segment [{seg.start_frame}, {seg.end_frame}) out of range for '{video.video_id}' "
            f"({video.num_frames} frames)"
        )


def group_state_counts(video: VideoAnnotation, seg: Segment, group: PartGroup) -> Counter:
    """State histogram of one group over every (frame, person, part) in the segment."""
    _check_segment(video, seg)
    counts: Counter = Counter()
    for frame in video.frames:
        if seg.covers(frame.frame_idx):
            for person in frame.persons:
                for part in person.parts:
                    if part.group is group:
                        counts[part.state] += 1
    return counts


def modal_state(counts: Counter) -> int:
    """Most frequent state; ties go to the lowest id; empty -> 0 ("none")."""
    if not counts:
        return 0
    return min(counts.items(), key=lambda item: (-item[1], item[0]))[0]


def _fraction(counts: Counter) -> float:
    total = sum(counts.values())
    return counts[modal_state(counts)] / total if total else 1.0


def tag_segment(video: VideoAnnotation, seg: Segment, vocab: Vocabulary) -> list[SegmentPseudoLabel]:
    """Six pseudo labels, one per part group, in PartGroup order."""
    labels = []
    for group in PartGroup:
        counts = group_state_counts(video, seg, group)
        labels.append(SegmentPseudoLabel(
            segment=seg,
            group=group,
            video_action=video.action,
            modal_state=modal_state(counts),
            frequency=_fraction(counts),
        ))
    return labels


def modal_fraction(video: VideoAnnotation, seg: Segment, group: PartGroup) -> float:
    """count(modal state) / count(instances); 1.0 for an empty group."""
    return _fraction(group_state_counts(video, seg, group))


def tag_video(video: VideoAnnotation, vocab: Vocabulary,
              duration_s: float = DEFAULT_SEGMENT_DURATION) -> list[SegmentPseudoLabel]:
    return [label for seg in split_segments(video, duration_s) for label in tag_segment(video, seg, vocab)]


def broadcast_accuracy(videos: list[VideoAnnotation], duration_s: float = DEFAULT_SEGMENT_DURATION
                       ) -> dict[PartGroup, float]:
    """Per-group frame-level state accuracy of broadcasting each segment's mode.

    Equals the instance-weighted mean modal fraction; groups with no
    instances anywhere report 1.0.
    """
    hits: Counter = Counter()
    totals: Counter = Counter()
    for video in videos:
        for seg in split_segments(video, duration_s):
            for group in PartGroup:
                counts = group_state_counts(video, seg, group)
                hits[group] += counts[modal_state(counts)] if counts else 0
                totals[group] += sum(counts.values())
    return {group: (hits[group] / totals[group] if totals[group] else 1.0) for group in PartGroup}


def parse_segment_labels(path, vocab: Vocabulary) -> list[SegmentPseudoLabel]:
    """Read make-segments output back; the composite string is authoritative."""
    doc = read_json(path)
    if not isinstance(doc, list):
        raise ValidationError("Segment label file must be a JSON list")
    labels = []
    for i, record in enumerate(doc):
        path_i = json_pointer(i)
        try:
            video_id, start, end = record["video_id"], record["start_frame"], record["end_frame"]
            composite = record["composite"]
        except (KeyError, TypeError):
            raise ValidationError("Segment label needs video_id, start_frame, end_frame, composite", path_i) from None
        match = COMPOSITE_RE.match(composite) if isinstance(composite, str) else None
        if match is None:
            raise ValidationError(f"Invalid composite '{composite}'. Must be '(<action>) <group>: <state>'.",
                                  f"{path_i}/composite")
        group = PartGroup(validate_part_group(match["group"], f"{path_i}/composite"))
        if "group" in record and record["group"] != group.value:
            raise ValidationError(f"Group '{record['group']}' disagrees with composite", f"{path_i}/group")
        if not (isinstance(start, int) and isinstance(end, int) and 0 <= start < end):
            raise ValidationError(f"Invalid frame range [{start}, {end})", path_i)
        labels.append(SegmentPseudoLabel(
            segment=Segment(video_id, start, end, float(record.get("duration_s", 0.0))),
            group=group,
            video_action=vocab.action_id(match["action"], f"{path_i}/composite"),
            modal_state=vocab.state_id(match["state"], f"{path_i}/composite"),
            frequency=float(record.get("frequency", 1.0)),
        ))
    logger.debug(f"Read {len(labels)} segment labels from {path}")
    return labels
