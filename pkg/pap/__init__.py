"""
Part-level action parsing toolkit.

Annotation model and parsing, a seeded synthetic generator, segment pseudo
labels, pose-guided embedding and box refinement, the PSC/ROC/AP scoring
protocol, and reference predictors.

This module re-exports the public API of the submodules.
"""

# Validation constants and errors
from .validation import (
    ValidationError,
    PART_CATEGORIES,
    PART_GROUPS,
    NONE_STATE,
    MAX_PERSONS_PER_FRAME,
    DEFAULT_KEYPOINT_COUNT,
)

# Data model
from .types import (
    BBox,
    PartCategory,
    PartGroup,
    Keypoint,
    Pose,
    PartAnnotation,
    PersonAnnotation,
    FrameAnnotation,
    VideoAnnotation,
    Vocabulary,
    PartPrediction,
    PersonPrediction,
    FramePrediction,
    VideoPrediction,
    PredictionSet,
    Image,
)

# File formats
from .anno import (
    parse_dataset,
    parse_predictions,
    dataset_to_dict,
    predictions_to_dict,
    write_json,
)
from .images import read_png, write_png

# Synthetic data
from .synth import (
    SynthConfig,
    ErrorRates,
    generate_dataset,
    write_dataset,
    corrupt_predictions,
)

# Segments
from .segmenter import (
    Segment,
    SegmentPseudoLabel,
    split_segments,
    tag_segment,
    tag_video,
    modal_fraction,
    broadcast_accuracy,
    parse_segment_labels,
)

# Pose embedding and refinement
from .pose_embed import (
    EmbedStyle,
    default_palette,
    render_embedding,
    refine_box,
    refine_predictions,
)

# Scoring
from .evaluator import (
    MatchPolicy,
    CostConfig,
    CostMode,
    PscResult,
    RocCurve,
    ScoreReport,
    iou,
    frame_psc,
    video_psc,
    roc_curve,
    roc_score,
    average_precision,
    detection_report,
    cost_units,
    cost_model,
    cost_reduction,
    score_dataset,
)

# Baselines
from .baselines import (
    ModeTable,
    VideoEvidence,
    DetectedPerson,
    DetectedPart,
    fit_mode_table,
    predict_mode,
    predict_constant,
    strip_states,
    assemble_predictions,
    segment_oracle_predictions,
)
