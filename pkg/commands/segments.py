"""
Segment pseudo-label command.
"""

import logging

import click

from pap import anno, config
from pap.parallel import map_ordered
from pap.segmenter import tag_video
from .common import INPUT_FILE, OUTPUT_PATH, emit_json, run_config

logger = logging.getLogger(__name__)


def register_segment_commands(cli):
    """Register make-segments."""

    @cli.command("make-segments")
    @click.option("--anno", "anno_path", type=INPUT_FILE, required=True, help="Annotation JSON file.")
    @click.option("--duration", type=click.FloatRange(min=0, min_open=True), default=config.SEGMENT_DURATION,
                  show_default=True, help="Segment length in seconds.")
    @click.option("--out", type=OUTPUT_PATH, help="Output JSON (default: standard output).")
    @click.pass_context
    def make_segments(ctx, anno_path, duration, out):
        """Emit six (action, group, modal state) labels per fixed-duration segment."""
        vocab, videos = anno.parse_dataset(anno_path)
        per_video = map_ordered(lambda video: tag_video(video, vocab, duration), videos, run_config(ctx).jobs)
        records = [label.to_record(vocab) for labels in per_video for label in labels]
        logger.info(f"Tagged {len(records) // 6} segments over {len(videos)} videos")
        emit_json(records, out)
