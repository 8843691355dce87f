"""
Commands package for the part-level action parsing CLI.

This module provides a unified entry point for registering every
subcommand on the click group built in main.py.

Command modules:
- dataset: validate, gen-synthetic
- segments: make-segments
- pose: render-pose, refine-boxes
- baselines: baseline-predict
- scoring: score, score-det, cost
"""

import logging
from typing import Optional

from pap import config

from .dataset import register_dataset_commands
from .segments import register_segment_commands
from .pose import register_pose_commands
from .baselines import register_baseline_commands
from .scoring import register_scoring_commands

# Re-export common utilities
from .common import percent, run_config

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

_logger = logging.getLogger("commands")


def configure_logging(level: str = config.LOG_LEVEL, log_file: Optional[str] = config.LOG_FILE) -> None:
    """Diagnostics go to standard error; a file handler is added when PAP_LOG_FILE is set."""
    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, handlers=handlers, force=True)


def register_commands(cli):
    """Register every subcommand on the given click group."""
    _logger.debug("Registering commands...")
    register_dataset_commands(cli)
    register_segment_commands(cli)
    register_pose_commands(cli)
    register_baseline_commands(cli)
    register_scoring_commands(cli)
    _logger.debug(f"Registered {len(cli.commands)} commands")


__all__ = [
    "configure_logging",
    "register_commands",
    "percent",
    "run_config",
    "register_dataset_commands",
    "register_segment_commands",
    "register_pose_commands",
    "register_baseline_commands",
    "register_scoring_commands",
]
