"""
Shared fixtures: a small vocabulary, hand-built videos and seeded synthetic data.
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from pap.anno import dataset_to_dict, write_json  # noqa: E402
from pap.synth import SynthConfig, generate_dataset  # noqa: E402
from pap.types import (  # noqa: E402
    BBox, FrameAnnotation, PartAnnotation, PartCategory, PersonAnnotation,
    VideoAnnotation, Vocabulary,
)

SMALL_VOCAB = Vocabulary(
    video_actions=("hurling_sport", "high_jump"),
    part_states=("none", "nod", "shake", "hold", "kick"),
)


def part(category: str, box=(0, 0, 10, 10), state: int = 0) -> PartAnnotation:
    return PartAnnotation(PartCategory(category), BBox(*map(float, box)), state)


def person(box=(0, 0, 100, 200), parts=(), pose=None) -> PersonAnnotation:
    return PersonAnnotation(BBox(*map(float, box)), tuple(parts), pose)


def video(video_id="v1", action=0, fps=1.0, duration_s=9.0, frames=()) -> VideoAnnotation:
    return VideoAnnotation(video_id, action, fps, duration_s, tuple(frames))


def frame(frame_idx: int, persons=()) -> FrameAnnotation:
    return FrameAnnotation(frame_idx, tuple(persons))


@pytest.fixture
def small_vocab() -> Vocabulary:
    return SMALL_VOCAB


@pytest.fixture(scope="session")
def synthetic():
    """A small seeded dataset without crops: (vocab, videos)."""
    cfg = SynthConfig(seed=7, n_videos=4, frames_per_video=6, persons_per_frame=(1, 3), render_crops=False)
    vocab, videos, _ = generate_dataset(cfg)
    return vocab, videos


@pytest.fixture
def anno_file(tmp_path, synthetic):
    vocab, videos = synthetic
    path = tmp_path / "annotations.json"
    write_json(path, dataset_to_dict(vocab, videos))
    return path
