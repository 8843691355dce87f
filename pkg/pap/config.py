"""
Environment defaults and the --config file layer.
"""

import json
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from .validation import ValidationError

load_dotenv()

SEGMENT_DURATION = float(os.environ.get("PAP_SEGMENT_DURATION", 3.0))
IOU_THRESHOLD = float(os.environ.get("PAP_IOU_THRESHOLD", 0.5))
CONF_THRESHOLD = float(os.environ.get("PAP_CONF_THRESHOLD", 0.3))
JOBS = int(os.environ.get("PAP_JOBS", 1))
SEED = int(os.environ.get("PAP_SEED", 1))
LOG_LEVEL = os.environ.get("PAP_LOG_LEVEL", "WARNING")
LOG_FILE = os.environ.get("PAP_LOG_FILE")

# Keys of a config file that feed the global options
GLOBAL_KEYS = ("seed", "jobs")


@dataclass(frozen=True)
class RunConfig:
    """Global options shared by every subcommand."""
    seed: int = SEED
    jobs: int = JOBS
    config_path: Optional[Path] = None

    def __post_init__(self):
        if isinstance(self.jobs, bool) or not isinstance(self.jobs, int) or self.jobs < 1:
            raise ValidationError(f"Invalid jobs '{self.jobs}'. Must be an integer >= 1.")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ValidationError(f"Invalid seed '{self.seed}'. Must be a non-negative integer.")


def load_config_file(path) -> dict:
    """Read a TOML (.toml) or JSON config file into a dict.

    Top-level `seed`/`jobs` set global options; tables named after a
    subcommand hold that subcommand's flag defaults (dashes or underscores).
    """
    path = Path(path)
    try:
        if path.suffix.lower() == ".toml":
            with path.open("rb") as f:
                data = tomllib.load(f)
        else:
            data = json.loads(path.read_text(encoding="utf-8"))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ValidationError(f"Invalid config file: {e}", str(path)) from None
    if not isinstance(data, dict):
        raise ValidationError("Config file must hold a table/object at the top level", str(path))
    return data


def default_map(data: dict, command_names) -> dict:
    """click default_map: {subcommand: {param_name: value}} from a config dict."""
    result = {}
    for name in command_names:
        table = data.get(name, data.get(name.replace("-", "_")))
        if table is None:
            continue
        if not isinstance(table, dict):
            raise ValidationError(f"Config entry '{name}' must be a table")
        result[name] = {key.replace("-", "_"): value for key, value in table.items()}
    return result
