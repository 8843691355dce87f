"""
Scoring commands: PSC/ROC, detection AP and the inference cost model.
"""

import csv
import io
import logging

import click

from pap import anno, config
from pap.evaluator import (
    CostConfig, CostMode, MatchPolicy, ScoreReport, cost_model, cost_reduction,
    detection_report, score_dataset,
)
from .common import INPUT_FILE, OUTPUT_PATH, emit_json, emit_text, load_predictions, percent, run_config

logger = logging.getLogger(__name__)

VIDEO_CSV_HEADER = ["video_id", "psc", "video_correct"]


def video_csv(report: ScoreReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(VIDEO_CSV_HEADER)
    for result in report.videos:
        writer.writerow([result.video_id, repr(result.psc), str(result.video_correct).lower()])
    return buffer.getvalue()


def report_text(report: ScoreReport) -> str:
    lines = [
        f"videos: {len(report.videos)}",
        f"video top-1 accuracy: {percent(report.video_accuracy)}",
        f"mean PSC: {percent(report.mean_psc)}",
        f"ROC score: {percent(report.roc_score)}",
        f"part state accuracy: {percent(report.part_accuracy)}",
    ]
    lines += [f"  {group.value}: {percent(acc)}" for group, acc in report.group_accuracy.items()]
    return "\n".join(lines) + "\n"


def register_scoring_commands(cli):
    """Register score, score-det and cost."""

    @cli.command("score")
    @click.option("--gt", "gt_path", type=INPUT_FILE, required=True, help="Ground-truth annotations.")
    @click.option("--pred", "pred_path", type=INPUT_FILE, required=True, help="Prediction JSON.")
    @click.option("--iou", type=click.FloatRange(0, 1, min_open=True), default=config.IOU_THRESHOLD,
                  show_default=True)
    @click.option("--report", type=OUTPUT_PATH, help="Per-video CSV (video_id, psc, video_correct).")
    @click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True)
    @click.pass_context
    def score(ctx, gt_path, pred_path, iou, report, fmt):
        """Video accuracy, mean PSC and ROC score of a prediction file."""
        vocab, videos = anno.parse_dataset(gt_path)
        _, predictions = load_predictions(pred_path, vocab)
        result = score_dataset(videos, predictions, MatchPolicy(iou), run_config(ctx).jobs)
        if report is not None:
            emit_text(video_csv(result), report)
        if fmt == "json":
            emit_json(result.summary(), None)
        elif fmt == "csv":
            emit_text(video_csv(result), None)
        else:
            emit_text(report_text(result), None)

    @cli.command("score-det")
    @click.option("--gt", "gt_path", type=INPUT_FILE, required=True, help="Ground-truth annotations.")
    @click.option("--pred", "pred_path", type=INPUT_FILE, required=True, help="Detection (prediction) JSON.")
    @click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
    def score_det(gt_path, pred_path, fmt):
        """AP (IoU 0.50:0.95) and AP@50 for persons and every part category."""
        vocab, videos = anno.parse_dataset(gt_path)
        _, predictions = load_predictions(pred_path, vocab)
        rows = detection_report(videos, predictions)
        if fmt == "json":
            emit_json([{"category": r.category, "ap": r.ap, "ap50": r.ap50, "n_gt": r.n_gt, "n_pred": r.n_pred}
                       for r in rows], None)
            return
        lines = [f"{'category':<12} {'AP':>7} {'AP@50':>7} {'gt':>7} {'pred':>7}"]
        lines += [f"{r.category:<12} {percent(r.ap):>7} {percent(r.ap50):>7} {r.n_gt:>7} {r.n_pred:>7}"
                  for r in rows]
        emit_text("\n".join(lines) + "\n", None)

    @cli.command("cost")
    @click.option("--duration", type=click.FloatRange(min=0, min_open=True), required=True,
                  help="Video duration in seconds.")
    @click.option("--segment-duration", type=click.FloatRange(min=0, min_open=True),
                  default=config.SEGMENT_DURATION, show_default=True)
    @click.option("--clips", type=click.IntRange(min=1), default=7, show_default=True)
    @click.option("--flops-per-clip", type=click.FloatRange(min=0, min_open=True), default=0.1, show_default=True,
                  help="TFLOPs per sampled clip.")
    @click.option("--keyframe-interval", type=click.FloatRange(min=0, min_open=True), default=1.0,
                  show_default=True)
    @click.option("--out", type=OUTPUT_PATH, help="Write JSON here instead of text to standard output.")
    def cost(duration, segment_duration, clips, flops_per_clip, keyframe_interval, out):
        """Frame-mode vs segment-mode recognizer TFLOPs for one video."""
        cfg = CostConfig(clips_per_unit=clips, flops_per_clip=flops_per_clip, keyframe_interval_s=keyframe_interval)
        frame = cost_model(duration, CostMode.FRAME, segment_duration, cfg)
        segment = cost_model(duration, CostMode.SEGMENT, segment_duration, cfg)
        reduction = cost_reduction(duration, segment_duration, cfg)
        if out is not None:
            emit_json({"frame_tflops": frame, "segment_tflops": segment, "reduction": reduction}, out)
            return
        click.echo(f"frame mode: {frame:.2f} TFLOPs")
        click.echo(f"segment mode ({segment_duration:g}s): {segment:.2f} TFLOPs")
        click.echo(f"reduction: {percent(reduction)}%")
        if reduction <= 0:
            logger.warning("Segment mode saves nothing at this segment duration")
