"""
Validation helper functions for annotation, prediction and tool inputs.
"""

import math
from typing import Optional

# Closed part vocabulary (left/right variants collapse into groups)
PART_CATEGORIES = [
    "head", "left_arm", "right_arm", "left_hand", "right_hand",
    "hip", "left_leg", "right_leg", "left_foot", "right_foot"
]

PART_GROUPS = ["head", "arm", "hand", "hip", "leg", "foot"]

# Reserved background part state, always at index 0
NONE_STATE = "none"

# A frame keeps at most this many predicted persons
MAX_PERSONS_PER_FRAME = 10

DEFAULT_KEYPOINT_COUNT = 17


class ValidationError(Exception):
    """Raised when input validation fails.

    `path` is a JSON-pointer-style location of the offending element
    ("" for the document root). `errors` holds every (path, message) pair
    when more than one violation was collected.
    """

    def __init__(self, message: str, path: str = "", errors: Optional[list[tuple[str, str]]] = None):
        self.message = message
        self.path = path
        self.errors = errors or [(path, message)]
        super().__init__(f"{path}: {message}" if path else message)


def json_pointer(*parts) -> str:
    """Build a JSON pointer from path components."""
    return "".join(f"/{p}" for p in parts)


def validate_finite(value: float, field_name: str, path: str = "") -> float:
    """Validate a number is finite."""
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValidationError(f"Invalid {field_name} '{value}'. Must be a finite number.", path)
    return float(value)


def validate_box(coords, path: str = "") -> tuple[float, float, float, float]:
    """Validate corner-form pixel box coordinates."""
    if not isinstance(coords, (list, tuple)) or len(coords) != 4:
        raise ValidationError(f"Invalid box '{coords}'. Must be [x_min, y_min, x_max, y_max].", path)
    x_min, y_min, x_max, y_max = (validate_finite(c, "box coordinate", path) for c in coords)
    if min(x_min, y_min, x_max, y_max) < 0:
        raise ValidationError(f"Invalid box {list(coords)}. Coordinates must be >= 0.", path)
    if not (x_min < x_max and y_min < y_max):
        raise ValidationError(f"Invalid box {list(coords)}. Must satisfy x_min < x_max and y_min < y_max.", path)
    return x_min, y_min, x_max, y_max


def validate_confidence(value: float, path: str = "", field_name: str = "confidence") -> float:
    """Validate a confidence or probability lies in [0, 1]."""
    value = validate_finite(value, field_name, path)
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"Invalid {field_name} '{value}'. Must be between 0 and 1.", path)
    return value


def validate_positive(value: float, field_name: str, path: str = "") -> float:
    """Validate a number is finite and strictly positive."""
    value = validate_finite(value, field_name, path)
    if value <= 0:
        raise ValidationError(f"Invalid {field_name} '{value}'. Must be > 0.", path)
    return value


def validate_count(value: int, field_name: str, minimum: int = 1) -> int:
    """Validate an integer count is at least `minimum`."""
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ValidationError(f"Invalid {field_name} '{value}'. Must be an integer >= {minimum}.")
    return value


def validate_part_category(category: str, path: str = "") -> str:
    """Validate part category against the closed set."""
    if category not in PART_CATEGORIES:
        raise ValidationError(
            f"Invalid part category '{category}'. Must be one of: {', '.join(PART_CATEGORIES)}", path
        )
    return category


def validate_part_group(group: str, path: str = "") -> str:
    """Validate part group against the closed set."""
    if group not in PART_GROUPS:
        raise ValidationError(f"Invalid part group '{group}'. Must be one of: {', '.join(PART_GROUPS)}", path)
    return group


def validate_vocabulary_names(video_actions: list[str], part_states: list[str]) -> None:
    """Validate vocabulary lists: non-empty, unique names, "none" first among states."""
    if not video_actions:
        raise ValidationError("Video action vocabulary cannot be empty", json_pointer("vocab", "video_actions"))
    if not part_states or part_states[0] != NONE_STATE:
        raise ValidationError(
            f"Part state vocabulary must start with '{NONE_STATE}'", json_pointer("vocab", "part_states", 0)
        )
    for field_name, names in (("video_actions", video_actions), ("part_states", part_states)):
        seen = set()
        for i, name in enumerate(names):
            if not name or not name.strip():
                raise ValidationError("Vocabulary names cannot be empty", json_pointer("vocab", field_name, i))
            if name in seen:
                raise ValidationError(f"Duplicate vocabulary name '{name}'", json_pointer("vocab", field_name, i))
            seen.add(name)
