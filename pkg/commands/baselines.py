"""
Baseline prediction command.
"""

import logging

import click

from pap import anno, config
from pap.baselines import (
    fit_mode_table, predict_constant, predict_mode, segment_oracle_predictions, strip_states,
)
from pap.validation import ValidationError
from .common import INPUT_FILE, OUTPUT_PATH, emit_json, run_config

logger = logging.getLogger(__name__)

MODE_HELP = "modal (fitted mode table), constant:<state>, or segment (oracle segment labels)."


def register_baseline_commands(cli):
    """Register baseline-predict."""

    @cli.command("baseline-predict")
    @click.option("--train", "train_path", type=INPUT_FILE, help="Training annotations (modal mode).")
    @click.option("--test", "test_path", type=INPUT_FILE, required=True, help="Test annotations.")
    @click.option("--out", type=OUTPUT_PATH, help="Output prediction JSON (default: standard output).")
    @click.option("--mode", default="modal", show_default=True, help=MODE_HELP)
    @click.option("--duration", type=click.FloatRange(min=0, min_open=True), default=config.SEGMENT_DURATION,
                  show_default=True, help="Segment length for --mode segment.")
    @click.pass_context
    def baseline_predict(ctx, train_path, test_path, out, mode, duration):
        """Predict part states from oracle boxes with a reference baseline."""
        vocab, test = anno.parse_dataset(test_path)
        if mode == "modal":
            if train_path is None:
                raise click.UsageError("--mode modal needs --train")
            train_vocab, train = anno.parse_dataset(train_path)
            if train_vocab != vocab:
                raise ValidationError("Training and test vocabularies differ", "/vocab")
            predictions = predict_mode(fit_mode_table(train, vocab), strip_states(test))
        elif mode.startswith("constant:"):
            state = vocab.state_id(mode.split(":", 1)[1])
            predictions = predict_constant(state, strip_states(test))
        elif mode == "segment":
            predictions = segment_oracle_predictions(test, vocab, duration, run_config(ctx).jobs)
        else:
            raise click.BadParameter(f"'{mode}'. Must be {MODE_HELP}", param_hint="--mode")
        logger.info(f"Predicted {len(predictions.videos)} videos with mode '{mode}'")
        emit_json(anno.predictions_to_dict(predictions, vocab), out)
