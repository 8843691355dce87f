"""
Common utilities for command modules.

Shared input loading, output writing and number formatting.
"""

import sys
from pathlib import Path
from typing import Optional

import click

from pap import anno
from pap.config import RunConfig
from pap.types import PredictionSet, Vocabulary
from pap.validation import ValidationError

# Shared click path types
INPUT_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
INPUT_DIR = click.Path(exists=True, file_okay=False, path_type=Path)
OUTPUT_PATH = click.Path(dir_okay=False, path_type=Path)


def run_config(ctx: click.Context) -> RunConfig:
    """Global options stored on the root context by main.cli."""
    obj = ctx.find_root().obj
    return obj if isinstance(obj, RunConfig) else RunConfig()


def percent(value: Optional[float]) -> str:
    """Fixed 2-decimal percentage, "n/a" when undefined."""
    return "n/a" if value is None else f"{value * 100:.2f}"


def emit_text(text: str, out: Optional[Path]) -> None:
    """Write results to --out when given, standard output otherwise."""
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def emit_json(doc, out: Optional[Path]) -> None:
    emit_text(anno.to_json_text(doc), out)


def load_predictions(path: Path, vocab: Optional[Vocabulary] = None) -> tuple[Vocabulary, PredictionSet]:
    """Parse a prediction file against `vocab`.

    Without an explicit vocabulary the file's embedded one is used, then the
    default vocabulary.
    """
    doc = anno.read_json(path)
    if vocab is None:
        vocab = Vocabulary.default()
        if isinstance(doc, dict) and isinstance(doc.get("vocab"), dict):
            try:
                vocab = anno.vocabulary_from_dict(doc["vocab"])
            except (KeyError, TypeError):
                raise ValidationError("Embedded vocabulary needs video_actions and part_states", "/vocab") from None
    return vocab, anno.predictions_from_dict(doc, vocab)


def parse_image_size(value: Optional[str]) -> Optional[tuple[int, int]]:
    """'WIDTHxHEIGHT' -> (width, height)."""
    if value is None:
        return None
    try:
        width, height = (int(v) for v in value.lower().split("x"))
    except ValueError:
        raise click.BadParameter(f"'{value}' must look like 640x360") from None
    if width < 1 or height < 1:
        raise click.BadParameter(f"'{value}' must have positive dimensions")
    return width, height
