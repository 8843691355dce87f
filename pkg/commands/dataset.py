"""
Dataset commands: validation and synthetic generation.
"""

import logging
from pathlib import Path

import click
import filelock

from pap import anno
from pap.synth import ErrorRates, SynthConfig, corrupt_predictions, generate_dataset, write_dataset
from .common import INPUT_FILE, OUTPUT_PATH, emit_json, load_predictions, run_config

logger = logging.getLogger(__name__)

LOCK_NAME = ".pap.lock"


def register_dataset_commands(cli):
    """Register validate and gen-synthetic."""

    @cli.command("validate")
    @click.option("--anno", "anno_path", type=INPUT_FILE, required=True, help="Annotation JSON file.")
    @click.option("--pred", "pred_path", type=INPUT_FILE, help="Also validate a prediction file against it.")
    def validate(anno_path, pred_path):
        """Validate an annotation (and optionally a prediction) file and print counts."""
        vocab, videos = anno.parse_dataset(anno_path)
        frames = sum(len(v.frames) for v in videos)
        persons = sum(len(f.persons) for v in videos for f in v.frames)
        parts = sum(len(p.parts) for v in videos for f in v.frames for p in f.persons)
        click.echo(f"annotations OK: {len(videos)} videos, {frames} frames, {persons} persons, "
                   f"{parts} parts ({len(vocab.video_actions)} actions, {len(vocab.part_states)} states)")
        if pred_path is not None:
            _, predictions = load_predictions(pred_path, vocab)
            pred_persons = sum(len(f.persons) for v in predictions.videos for f in v.frames)
            click.echo(f"predictions OK: {len(predictions.videos)} videos, {pred_persons} persons")

    @cli.command("gen-synthetic")
    @click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True,
                  help="Output directory (annotations.json, crops/).")
    @click.option("--n-videos", type=click.IntRange(min=1), default=10, show_default=True)
    @click.option("--frames-per-video", type=click.IntRange(min=1), default=9, show_default=True)
    @click.option("--persons-min", type=click.IntRange(1, 10), default=1, show_default=True)
    @click.option("--persons-max", type=click.IntRange(1, 10), default=3, show_default=True)
    @click.option("--image-width", type=click.IntRange(min=60), default=640, show_default=True)
    @click.option("--image-height", type=click.IntRange(min=60), default=360, show_default=True)
    @click.option("--state-skew", type=float, default=0.977, show_default=True,
                  help="Mass of the modal state per (action, group), in [1/75, 1].")
    @click.option("--keypoint-jitter", type=click.FloatRange(min=0), default=2.0, show_default=True)
    @click.option("--fps", type=click.FloatRange(min=0, min_open=True), default=1.0, show_default=True)
    @click.option("--n-keypoints", type=click.IntRange(1, 17), default=17, show_default=True)
    @click.option("--crops/--no-crops", default=True, show_default=True, help="Render person crop PNGs.")
    @click.option("--pred-out", type=OUTPUT_PATH, help="Also write corrupted predictions here.")
    @click.option("--action-flip", type=click.FloatRange(0, 1), default=0.0, show_default=True)
    @click.option("--box-jitter", type=click.FloatRange(0, 1), default=0.0, show_default=True)
    @click.option("--state-flip", type=click.FloatRange(0, 1), default=0.0, show_default=True)
    @click.pass_context
    def gen_synthetic(ctx, out_dir, n_videos, frames_per_video, persons_min, persons_max, image_width,
                      image_height, state_skew, keypoint_jitter, fps, n_keypoints, crops, pred_out,
                      action_flip, box_jitter, state_flip):
        """Generate a seeded synthetic dataset with long-tailed part states."""
        run = run_config(ctx)
        cfg = SynthConfig(
            seed=run.seed,
            n_videos=n_videos,
            frames_per_video=frames_per_video,
            persons_per_frame=(persons_min, persons_max),
            image_size=(image_width, image_height),
            state_skew=state_skew,
            keypoint_jitter=keypoint_jitter,
            fps=fps,
            n_keypoints=n_keypoints,
            render_crops=crops,
        )
        rates = ErrorRates(action_flip=action_flip, box_jitter=box_jitter, state_flip=state_flip)
        vocab, videos, images = generate_dataset(cfg, jobs=run.jobs)
        out_dir.mkdir(parents=True, exist_ok=True)
        with filelock.FileLock(str(out_dir / LOCK_NAME), timeout=60):
            counts = write_dataset(out_dir, vocab, videos, images)
        if pred_out is not None:
            emit_json(anno.predictions_to_dict(corrupt_predictions(videos, vocab, rates, run.seed), vocab), pred_out)
        click.echo(f"wrote {counts['videos']} videos, {counts['persons']} persons, "
                   f"{counts['crops']} crops to {out_dir}")
