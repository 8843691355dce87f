"""
Scoring protocol: IoU, Part State Correctness, ROC score, AP and cost model.

PSC matching is normative for this toolkit:
- predicted persons are taken in descending confidence (stable for ties),
  each matched one-to-one to the remaining GT person with the highest IoU,
  provided IoU >= threshold (ties go to the lowest GT index);
- inside a matched pair a GT part is correct iff the prediction has a part of
  the same category with IoU >= threshold and the same state id;
- unmatched GT persons contribute all their parts as incorrect.

PSC is correct GT part instances / all GT part instances of the video.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .parallel import map_ordered
from .types import (
    BBox, FrameAnnotation, FramePrediction, PartCategory, PartGroup, PersonAnnotation,
    PersonPrediction, PredictionSet, VideoAnnotation, VideoPrediction,
)
from .validation import ValidationError, validate_positive

logger = logging.getLogger(__name__)

DEFAULT_IOU_THRESHOLD = 0.5

# 0.50:0.05:0.95
AP_IOU_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))

PERSON_CATEGORY = "person"


@dataclass(frozen=True)
class MatchPolicy:
    iou_threshold: float = DEFAULT_IOU_THRESHOLD

    def __post_init__(self):
        if isinstance(self.iou_threshold, bool) or not 0 < self.iou_threshold <= 1:
            raise ValidationError(f"Invalid IoU threshold '{self.iou_threshold}'. Must be in (0, 1].")


def iou(a: BBox, b: BBox) -> float:
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


# ===== PART STATE CORRECTNESS =====

@dataclass(frozen=True)
class FramePsc:
    frame_idx: int
    correct: int
    total: int
    matched: int
    group_correct: Mapping[PartGroup, int] = field(default_factory=dict)
    group_total: Mapping[PartGroup, int] = field(default_factory=dict)


@dataclass(frozen=True)
class PscResult:
    video_id: str
    psc: float
    video_correct: bool
    correct: int
    total: int
    frames: tuple[FramePsc, ...] = ()

    def group_counts(self) -> tuple[Counter, Counter]:
        hits, totals = Counter(), Counter()
        for frame in self.frames:
            hits.update(frame.group_correct)
            totals.update(frame.group_total)
        return hits, totals


def match_persons(gt_persons: Sequence[PersonAnnotation], pred_persons: Sequence[PersonPrediction],
                  policy: MatchPolicy) -> list[tuple[int, int]]:
    """Greedy one-to-one matching; returns (pred index, gt index) pairs in match order.

    Each prediction, in descending confidence, takes the free GT person with
    the highest IoU >= threshold. Exact IoU ties go to the GT person with
    more correct parts, then to the lower index.
    """
    order = sorted(range(len(pred_persons)), key=lambda i: -pred_persons[i].confidence)
    free = set(range(len(gt_persons)))
    pairs = []
    for p in order:
        best, best_key = None, None
        for g in sorted(free):
            overlap = iou(pred_persons[p].box, gt_persons[g].box)
            if overlap < policy.iou_threshold:
                continue
            key = (overlap, sum(ok for _, ok in _part_hits(gt_persons[g], pred_persons[p], policy)))
            if best_key is None or key > best_key:
                best, best_key = g, key
        if best is not None:
            free.discard(best)
            pairs.append((p, best))
    return pairs


def _part_hits(gt_person: PersonAnnotation, pred_person: Optional[PersonPrediction],
               policy: MatchPolicy) -> list[tuple[PartGroup, bool]]:
    pred_parts = {part.category: part for part in pred_person.parts} if pred_person else {}
    hits = []
    for part in gt_person.parts:
        guess = pred_parts.get(part.category)
        ok = (guess is not None and guess.state == part.state
              and iou(guess.box, part.box) >= policy.iou_threshold)
        hits.append((part.group, ok))
    return hits


def frame_psc(gt: FrameAnnotation, pred: Optional[FramePrediction],
              policy: MatchPolicy = MatchPolicy()) -> FramePsc:
    pred_persons = pred.persons if pred is not None else ()
    assigned = {g: p for p, g in match_persons(gt.persons, pred_persons, policy)}
    group_correct: Counter = Counter()
    group_total: Counter = Counter()
    for g, person in enumerate(gt.persons):
        pred_person = pred_persons[assigned[g]] if g in assigned else None
        for group, ok in _part_hits(person, pred_person, policy):
            group_total[group] += 1
            group_correct[group] += ok
    return FramePsc(
        frame_idx=gt.frame_idx,
        correct=sum(group_correct.values()),
        total=sum(group_total.values()),
        matched=len(assigned),
        group_correct=dict(group_correct),
        group_total=dict(group_total),
    )


def exhaustive_frame_psc(gt: FrameAnnotation, pred: Optional[FramePrediction],
                         policy: MatchPolicy = MatchPolicy()) -> tuple[int, int]:
    """Audit oracle: best (correct parts, matched persons) over every one-to-one assignment.

    Only pairs with person IoU >= threshold may be assigned. Exponential in
    the number of persons; meant for small frames.
    """
    pred_persons = pred.persons if pred is not None else ()
    gain = [
        [sum(ok for _, ok in _part_hits(person, candidate, policy))
         if iou(candidate.box, person.box) >= policy.iou_threshold else None
         for candidate in pred_persons]
        for person in gt.persons
    ]
    best = (0, 0)
    slots = [None, *range(len(pred_persons))]
    for choice in itertools.product(slots, repeat=len(gt.persons)):
        used = [c for c in choice if c is not None]
        if len(used) != len(set(used)) or any(c is not None and gain[g][c] is None for g, c in enumerate(choice)):
            continue
        score = (sum(gain[g][c] for g, c in enumerate(choice) if c is not None), len(used))
        best = max(best, score)
    return best


def video_psc(gt: VideoAnnotation, pred: Optional[VideoPrediction],
              policy: MatchPolicy = MatchPolicy()) -> PscResult:
    if pred is None:
        logger.warning(f"Video '{gt.video_id}' missing from predictions; scoring psc 0")
        frames = tuple(frame_psc(frame, None, policy) for frame in gt.frames)
        total = sum(f.total for f in frames)
        return PscResult(gt.video_id, 0.0, False, 0, total, frames)
    frames = tuple(frame_psc(frame, pred.by_frame.get(frame.frame_idx), policy) for frame in gt.frames)
    correct = sum(f.correct for f in frames)
    total = sum(f.total for f in frames)
    return PscResult(
        video_id=gt.video_id,
        psc=correct / total if total else 0.0,
        video_correct=pred.action == gt.action,
        correct=correct,
        total=total,
        frames=frames,
    )


# ===== ROC =====

@dataclass(frozen=True)
class RocCurve:
    """accuracy(t) is accuracy[k] for t in (thresholds[k-1], thresholds[k]], 0 above the last."""
    thresholds: tuple[float, ...]
    accuracy: tuple[float, ...]
    score: float


def roc_curve(results: Iterable[tuple[bool, float]]) -> RocCurve:
    """Exact integral over t in [0, 1] of the fraction of videos correct with psc >= t."""
    results = list(results)
    if not results:
        raise ValidationError("Cannot compute a ROC score over zero videos")
    for i, (_, psc) in enumerate(results):
        if not 0 <= psc <= 1:
            raise ValidationError(f"Invalid psc '{psc}'. Must be in [0, 1].", f"/{i}")
    n = len(results)
    pscs = sorted(psc for correct, psc in results if correct)
    m = len(pscs)
    thresholds, accuracy, areas = [], [], []
    previous = 0.0
    for k, p in enumerate(pscs):
        if p > previous:
            thresholds.append(p)
            accuracy.append((m - k) / n)
            areas.append((p - previous) * accuracy[-1])
            previous = p
    return RocCurve(tuple(thresholds), tuple(accuracy), math.fsum(areas))


def roc_score(results: Iterable[tuple[bool, float]]) -> float:
    return roc_curve(results).score


# ===== DETECTION AP =====

def average_precision(gt_by_image: Mapping[object, Sequence[BBox]],
                      predictions: Sequence[tuple[object, BBox, float]],
                      iou_threshold: float = DEFAULT_IOU_THRESHOLD) -> Optional[float]:
    """All-point interpolated AP for one category; None when there is no GT box.

    Predictions are (image key, box, confidence); each GT box is matched at
    most once, to the highest-confidence prediction reaching the threshold.
    """
    n_gt = sum(len(boxes) for boxes in gt_by_image.values())
    if n_gt == 0:
        return None
    if not predictions:
        return 0.0
    order = sorted(range(len(predictions)), key=lambda i: -predictions[i][2])
    used = {image: [False] * len(boxes) for image, boxes in gt_by_image.items()}
    tp = np.zeros(len(order))
    for rank, i in enumerate(order):
        image, box, _ = predictions[i]
        gts = gt_by_image.get(image, ())
        best, best_iou = -1, iou_threshold
        for g, gt_box in enumerate(gts):
            if used[image][g]:
                continue
            overlap = iou(box, gt_box)
            if overlap >= best_iou and (best < 0 or overlap > best_iou):
                best, best_iou = g, overlap
        if best >= 0:
            used[image][best] = True
            tp[rank] = 1.0
    tp_cum = np.cumsum(tp)
    fp_cum = np.cumsum(1.0 - tp)
    recall = tp_cum / n_gt
    precision = tp_cum / (tp_cum + fp_cum)

    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    steps = np.nonzero(mrec[1:] != mrec[:-1])[0]
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))


@dataclass(frozen=True)
class DetectionAP:
    category: str
    ap: Optional[float]  # mean over AP_IOU_THRESHOLDS
    ap50: Optional[float]
    n_gt: int
    n_pred: int


def _category_boxes(gt_videos: Sequence[VideoAnnotation], predictions: PredictionSet, category: str):
    gt_by_image: dict[tuple[str, int], list[BBox]] = {}
    preds: list[tuple[tuple[str, int], BBox, float]] = []
    for video in gt_videos:
        for frame in video.frames:
            key = (video.video_id, frame.frame_idx)
            boxes = gt_by_image.setdefault(key, [])
            for person in frame.persons:
                if category == PERSON_CATEGORY:
                    boxes.append(person.box)
                else:
                    boxes.extend(part.box for part in person.parts if part.category.value == category)
    for video in predictions.videos:
        for frame in video.frames:
            key = (video.video_id, frame.frame_idx)
            for person in frame.persons:
                if category == PERSON_CATEGORY:
                    preds.append((key, person.box, person.confidence))
                else:
                    preds.extend((key, part.box, part.confidence)
                                 for part in person.parts if part.category.value == category)
    return gt_by_image, preds


def detection_report(gt_videos: Sequence[VideoAnnotation], predictions: PredictionSet,
                     thresholds: Sequence[float] = AP_IOU_THRESHOLDS) -> list[DetectionAP]:
    """AP and AP@50 for persons and each of the ten part categories."""
    report = []
    for category in [PERSON_CATEGORY, *(c.value for c in PartCategory)]:
        gt_by_image, preds = _category_boxes(gt_videos, predictions, category)
        n_gt = sum(len(b) for b in gt_by_image.values())
        per_threshold = [average_precision(gt_by_image, preds, t) for t in thresholds]
        ap = None if n_gt == 0 else math.fsum(per_threshold) / len(per_threshold)
        report.append(DetectionAP(
            category=category,
            ap=ap,
            ap50=None if n_gt == 0 else average_precision(gt_by_image, preds, 0.5),
            n_gt=n_gt,
            n_pred=len(preds),
        ))
    return report


# ===== COST MODEL =====

class CostMode(str, Enum):
    FRAME = "frame"
    SEGMENT = "segment"


@dataclass(frozen=True)
class CostConfig:
    clips_per_unit: int = 7
    frames_per_clip: int = 32
    frame_stride: int = 2
    flops_per_clip: float = 0.1  # TFLOPs
    fps: float = 30.0
    keyframe_interval_s: float = 1.0

    def __post_init__(self):
        for name in ("clips_per_unit", "frames_per_clip", "frame_stride", "flops_per_clip",
                     "fps", "keyframe_interval_s"):
            validate_positive(getattr(self, name), name)

    @property
    def clip_span_s(self) -> float:
        """Wall-clock length covered by one sampled clip (T x tau frames)."""
        return self.frames_per_clip * self.frame_stride / self.fps


def _units(duration_s: float, unit_s: float) -> int:
    return max(1, math.ceil(duration_s / unit_s - 1e-9))


def cost_units(video_duration_s: float, mode: Union[CostMode, str], segment_duration_s: float = 3.0,
               cfg: CostConfig = CostConfig()) -> int:
    """Recognizer invocations: keyframes in frame mode, segments in segment mode."""
    validate_positive(video_duration_s, "video duration")
    validate_positive(segment_duration_s, "segment duration")
    if CostMode(mode) is CostMode.FRAME:
        return _units(video_duration_s, cfg.keyframe_interval_s)
    return _units(video_duration_s, segment_duration_s)


def cost_model(video_duration_s: float, mode: Union[CostMode, str], segment_duration_s: float = 3.0,
               cfg: CostConfig = CostConfig()) -> float:
    """Recognizer TFLOPs for one video: units x clips_per_unit x flops_per_clip."""
    return cost_units(video_duration_s, mode, segment_duration_s, cfg) * cfg.clips_per_unit * cfg.flops_per_clip


def cost_reduction(video_duration_s: float, segment_duration_s: float = 3.0,
                   cfg: CostConfig = CostConfig()) -> float:
    """Fraction of frame-mode cost saved by segment mode."""
    frame = cost_units(video_duration_s, CostMode.FRAME, segment_duration_s, cfg)
    segment = cost_units(video_duration_s, CostMode.SEGMENT, segment_duration_s, cfg)
    return (frame - segment) / frame


# ===== DATASET SCORING =====

@dataclass(frozen=True)
class ScoreReport:
    videos: tuple[PscResult, ...]
    video_accuracy: float
    mean_psc: float
    roc: RocCurve
    part_accuracy: Optional[float]  # instance-weighted over every GT part
    group_accuracy: Mapping[PartGroup, Optional[float]]

    @property
    def roc_score(self) -> float:
        return self.roc.score

    def summary(self) -> dict:
        return {
            "videos": len(self.videos),
            "video_accuracy": self.video_accuracy,
            "mean_psc": self.mean_psc,
            "roc_score": self.roc.score,
            "part_accuracy": self.part_accuracy,
            "group_accuracy": {g.value: acc for g, acc in self.group_accuracy.items()},
        }


def score_dataset(gt_videos: Sequence[VideoAnnotation], predictions: PredictionSet,
                  policy: MatchPolicy = MatchPolicy(), jobs: int = 1) -> ScoreReport:
    """Score every GT video; results merge in GT order for any `jobs`."""
    if not gt_videos:
        raise ValidationError("Ground truth has no videos to score")
    known = {video.video_id for video in gt_videos}
    extra = [v.video_id for v in predictions.videos if v.video_id not in known]
    if extra:
        logger.warning(f"Ignoring {len(extra)} predicted videos absent from ground truth")
    results = map_ordered(lambda video: video_psc(video, predictions.get(video.video_id), policy),
                          gt_videos, jobs)
    n = len(results)
    hits, totals = Counter(), Counter()
    for result in results:
        result_hits, result_totals = result.group_counts()
        hits.update(result_hits)
        totals.update(result_totals)
    correct, total = sum(r.correct for r in results), sum(r.total for r in results)
    report = ScoreReport(
        videos=tuple(results),
        video_accuracy=sum(r.video_correct for r in results) / n,
        mean_psc=math.fsum(r.psc for r in results) / n,
        roc=roc_curve((r.video_correct, r.psc) for r in results),
        part_accuracy=correct / total if total else None,
        group_accuracy={g: (hits[g] / totals[g] if totals[g] else None) for g in PartGroup},
    )
    logger.info(f"Scored {n} videos: ROC {report.roc.score:.4f}, mean PSC {report.mean_psc:.4f}")
    return report
