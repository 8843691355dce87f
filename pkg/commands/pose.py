"""
Pose commands: positional-embedding rendering and box refinement.
"""

import logging
from pathlib import Path
from typing import Optional

import click
import filelock

from pap import anno, config
from pap.images import read_png, write_png
from pap.parallel import map_ordered
from pap.pose_embed import (
    DEFAULT_RADIUS_MIN, DEFAULT_RADIUS_RATIO, EmbedStyle, refine_predictions, render_embedding,
)
from pap.types import Keypoint, Pose
from pap.validation import DEFAULT_KEYPOINT_COUNT, ValidationError, json_pointer, validate_finite
from .common import INPUT_DIR, INPUT_FILE, OUTPUT_PATH, emit_json, load_predictions, parse_image_size, run_config
from .dataset import LOCK_NAME

logger = logging.getLogger(__name__)


def _manifest_entries(manifest_path: Path) -> list[tuple[str, Optional[Pose]]]:
    """(file name, crop-frame pose) pairs from a crop manifest."""
    doc = anno.read_json(manifest_path)
    if not isinstance(doc, dict) or not isinstance(doc.get("crops"), list):
        raise ValidationError("Crop manifest must be an object with a 'crops' list")
    entries = []
    for i, entry in enumerate(doc["crops"]):
        path = json_pointer("crops", i)
        if not isinstance(entry, dict) or not isinstance(entry.get("file"), str):
            raise ValidationError("Crop entry needs a 'file' name", path)
        name = entry["file"]
        if Path(name).name != name:
            raise ValidationError(f"Invalid crop file '{name}'. Must be a bare file name.", f"{path}/file")
        raw = entry.get("pose")
        pose = None
        if raw is not None:
            if not isinstance(raw, list):
                raise ValidationError("Pose must be a list of [x, y, confidence]", f"{path}/pose")
            keypoints = []
            for k, kp in enumerate(raw):
                if not isinstance(kp, list) or len(kp) != 3:
                    raise ValidationError("Keypoint must be [x, y, confidence]", f"{path}/pose/{k}")
                x, y, conf = (validate_finite(v, "keypoint value", f"{path}/pose/{k}") for v in kp)
                keypoints.append(Keypoint(x, y, conf))
            pose = Pose(tuple(keypoints))
        entries.append((name, pose))
    return entries


def register_pose_commands(cli):
    """Register render-pose and refine-boxes."""

    @cli.command("render-pose")
    @click.option("--crops", "crop_dir", type=INPUT_DIR, required=True, help="Directory of crop PNGs.")
    @click.option("--manifest", type=INPUT_FILE, help="Pose JSON (default: <crops>/manifest.json).")
    @click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True)
    @click.option("--radius-ratio", type=click.FloatRange(min=0, min_open=True), default=DEFAULT_RADIUS_RATIO,
                  show_default=True)
    @click.option("--radius-min", type=click.FloatRange(min=1), default=DEFAULT_RADIUS_MIN, show_default=True)
    @click.option("--conf-threshold", type=click.FloatRange(0, 1), default=config.CONF_THRESHOLD, show_default=True)
    @click.option("--palette-size", type=click.IntRange(min=1), default=DEFAULT_KEYPOINT_COUNT, show_default=True)
    @click.pass_context
    def render_pose(ctx, crop_dir, manifest, out_dir, radius_ratio, radius_min, conf_threshold, palette_size):
        """Composite colored keypoint disks onto person crops."""
        style = EmbedStyle.default(palette_size, radius_ratio=radius_ratio, radius_min=radius_min,
                                   conf_threshold=conf_threshold)
        entries = _manifest_entries(manifest or crop_dir / "manifest.json")

        def render(entry):
            name, pose = entry
            crop = read_png(crop_dir / name)
            return name, render_embedding(crop, pose, style) if pose is not None else crop

        rendered = map_ordered(render, entries, run_config(ctx).jobs)
        out_dir.mkdir(parents=True, exist_ok=True)
        with filelock.FileLock(str(out_dir / LOCK_NAME), timeout=60):
            for name, image in rendered:
                write_png(out_dir / name, image)
        click.echo(f"rendered {len(rendered)} crops to {out_dir}")

    @cli.command("refine-boxes")
    @click.option("--pred", "pred_path", type=INPUT_FILE, required=True, help="Prediction JSON with poses.")
    @click.option("--anno", "anno_path", type=INPUT_FILE, help="Annotation file supplying the vocabulary.")
    @click.option("--out", type=OUTPUT_PATH, help="Output JSON (default: standard output).")
    @click.option("--conf-threshold", type=click.FloatRange(0, 1), default=config.CONF_THRESHOLD, show_default=True)
    @click.option("--margin", type=click.FloatRange(min=0), default=0.0, show_default=True)
    @click.option("--image-size", help="Clip refined boxes to WIDTHxHEIGHT.")
    def refine_boxes(pred_path, anno_path, out, conf_threshold, margin, image_size):
        """Grow predicted person boxes to include every confident keypoint."""
        bounds = parse_image_size(image_size)
        vocab = anno.parse_dataset(anno_path)[0] if anno_path else None
        vocab, predictions = load_predictions(pred_path, vocab)
        refined = refine_predictions(predictions, conf_threshold, margin, bounds)
        emit_json(anno.predictions_to_dict(refined, vocab), out)
