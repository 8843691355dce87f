import json
from collections import Counter

import pytest

from pap.anno import write_json
from pap.rng import Rng
from pap.segmenter import (
    Segment, broadcast_accuracy, modal_fraction, parse_segment_labels, split_segments, tag_segment, tag_video,
)
from pap.synth import SynthConfig, generate_dataset
from pap.types import PART_GROUP_OF, PartCategory, PartGroup, Vocabulary
from pap.validation import ValidationError

from conftest import frame, part, person, video


def _sizes(segments):
    return [s.end_frame - s.start_frame for s in segments]


def _dense(num_frames, fps=1.0, duration_s=None):
    return video(fps=fps, duration_s=duration_s or num_frames / fps,
                 frames=[frame(i, [person(parts=[part("head")])]) for i in range(num_frames)])


def test_exact_division():
    assert _sizes(split_segments(_dense(9), 3.0)) == [3, 3, 3]


def test_remainder_segment():
    segments = split_segments(_dense(10), 3.0)
    assert _sizes(segments) == [3, 3, 3, 1]
    assert segments[-1].start_frame == 9


def test_duration_exceeding_video():
    segments = split_segments(_dense(9), 10.0)
    assert [(s.start_frame, s.end_frame) for s in segments] == [(0, 9)]


def test_segment_length_rounds_to_frames():
    # 3 s at 2.5 fps is 7.5 frames, rounded half-up to 8
    assert _sizes(split_segments(_dense(20, fps=2.5), 3.0)) == [8, 8, 4]


def test_segments_are_contiguous_and_cover():
    segments = split_segments(_dense(17), 4.0)
    assert segments[0].start_frame == 0 and segments[-1].end_frame == 17
    assert all(a.end_frame == b.start_frame for a, b in zip(segments, segments[1:]))


def test_no_frames_is_an_error():
    with pytest.raises(ValidationError):
        split_segments(video(frames=[]), 3.0)
    with pytest.raises(ValidationError):
        split_segments(_dense(3), 0.0)


def test_hurling_head_none():
    vocab = Vocabulary.default()
    action = vocab.action_id("hurling_sport")
    nod = vocab.state_id("nod")
    states = [0, 0, 0, nod]
    v = video(action=action, duration_s=4.0,
              frames=[frame(i, [person(parts=[part("head", state=s)])]) for i, s in enumerate(states)])
    seg = split_segments(v, 4.0)[0]
    labels = tag_segment(v, seg, vocab)
    assert len(labels) == 6
    assert [l.group for l in labels] == list(PartGroup)
    assert labels[0].composite(vocab) == "(hurling_sport) head: none"
    assert modal_fraction(v, seg, PartGroup.HEAD) == 0.75


def test_empty_group_is_none(small_vocab):
    v = _dense(3)
    seg = split_segments(v, 3.0)[0]
    leg = [l for l in tag_segment(v, seg, small_vocab) if l.group is PartGroup.LEG][0]
    assert leg.modal_state == 0
    assert leg.composite(small_vocab) == "(hurling_sport) leg: none"
    assert modal_fraction(v, seg, PartGroup.LEG) == 1.0


def test_constant_segment_fraction_one():
    v = video(duration_s=3.0, frames=[frame(i, [person(parts=[part("left_arm", state=2), part("right_arm", state=2)])])
                                      for i in range(3)])
    assert modal_fraction(v, split_segments(v, 3.0)[0], PartGroup.ARM) == 1.0


def test_tie_goes_to_lowest_state(small_vocab):
    v = video(duration_s=2.0, frames=[frame(0, [person(parts=[part("hip", state=3)])]),
                                      frame(1, [person(parts=[part("hip", state=1)])])])
    hip = tag_segment(v, split_segments(v, 3.0)[0], small_vocab)[3]
    assert hip.group is PartGroup.HIP and hip.modal_state == 1


def test_left_and_right_pool(small_vocab):
    v = video(duration_s=1.0, frames=[frame(0, [person(parts=[
        part("left_hand", state=3), part("right_hand", state=3)]), person(parts=[part("left_hand", state=4)])])])
    hand = tag_segment(v, split_segments(v, 1.0)[0], small_vocab)[2]
    assert hand.modal_state == 3 and hand.frequency == pytest.approx(2 / 3)


def test_out_of_range_segment(small_vocab):
    v = _dense(3)
    with pytest.raises(ValidationError):
        tag_segment(v, Segment("v1", 0, 7, 7.0), small_vocab)
    with pytest.raises(ValidationError):
        tag_segment(v, Segment("other", 0, 1, 1.0), small_vocab)


def _random_video(stream: Rng, n_states: int):
    frames = []
    for f in range(stream.randint(1, 6)):
        persons = []
        for _ in range(stream.randint(0, 3)):
            categories = [c for c in PartCategory if stream.below(3)]
            persons.append(person(parts=[part(c.value, state=stream.below(n_states)) for c in categories]))
        frames.append(frame(f, persons))
    return video(duration_s=len(frames), frames=frames)


def test_tag_segment_matches_exhaustive_count(small_vocab):
    stream = Rng(2024)
    n_states = len(small_vocab.part_states)
    checked = 0
    while checked < 1000:
        v = _random_video(stream, n_states)
        for seg in split_segments(v, float(stream.randint(1, 4))):
            labels = {l.group: l for l in tag_segment(v, seg, small_vocab)}
            for group in PartGroup:
                counts = Counter(
                    p.state
                    for fr in v.frames if seg.start_frame <= fr.frame_idx < seg.end_frame
                    for pe in fr.persons for p in pe.parts if PART_GROUP_OF[p.category] is group
                )
                expected = 0
                if counts:
                    top = max(counts.values())
                    expected = min(s for s, c in counts.items() if c == top)
                assert labels[group].modal_state == expected
            checked += 1


def test_permutation_invariance(small_vocab):
    stream = Rng(5)
    v = _random_video(stream, len(small_vocab.part_states))
    shuffled = video(duration_s=v.duration_s,
                     frames=[frame(f.frame_idx, list(reversed(f.persons))) for f in v.frames])
    for seg in split_segments(v, 2.0):
        assert [l.modal_state for l in tag_segment(v, seg, small_vocab)] == \
            [l.modal_state for l in tag_segment(shuffled, seg, small_vocab)]


def test_dataset_mean_head_fraction_matches_skew():
    cfg = SynthConfig(seed=1, n_videos=100, frames_per_video=30, persons_per_frame=(4, 4), render_crops=False)
    _, videos, _ = generate_dataset(cfg)
    assert abs(broadcast_accuracy(videos, 3.0)[PartGroup.HEAD] - 0.977) <= 0.01


def test_broadcast_accuracy_is_weighted_mean_fraction(synthetic):
    vocab, videos = synthetic
    hits = totals = 0
    fractions = []
    for v in videos:
        for seg in split_segments(v, 3.0):
            n = sum(1 for fr in v.frames if seg.covers(fr.frame_idx)
                    for pe in fr.persons for p in pe.parts if p.group is PartGroup.ARM)
            if n:
                fractions.append(modal_fraction(v, seg, PartGroup.ARM))
            hits += modal_fraction(v, seg, PartGroup.ARM) * n
            totals += n
    accuracy = broadcast_accuracy(videos, 3.0)[PartGroup.ARM]
    assert accuracy == pytest.approx(hits / totals)
    loss = 1 - accuracy
    assert 1 - max(fractions) - 1e-12 <= loss <= 1 - min(fractions) + 1e-12


def test_coarser_segments_never_lose_less(synthetic):
    _, videos = synthetic
    for group in PartGroup:
        fine = broadcast_accuracy(videos, 1.0)[group]
        medium = broadcast_accuracy(videos, 3.0)[group]
        coarse = broadcast_accuracy(videos, 6.0)[group]
        assert coarse <= medium <= fine <= 1.0


def test_segment_records_round_trip(tmp_path, synthetic):
    vocab, videos = synthetic
    labels = tag_video(videos[0], vocab, 3.0)
    records = [l.to_record(vocab) for l in labels]
    assert set(records[0]) == {"video_id", "start_frame", "end_frame", "group", "composite", "frequency"}
    path = tmp_path / "segments.json"
    write_json(path, records)
    parsed = parse_segment_labels(path, vocab)
    assert [(l.segment.start_frame, l.group, l.video_action, l.modal_state) for l in parsed] == \
        [(l.segment.start_frame, l.group, l.video_action, l.modal_state) for l in labels]


def test_bad_composite_rejected(tmp_path, small_vocab):
    path = tmp_path / "segments.json"
    path.write_text(json.dumps([{"video_id": "v1", "start_frame": 0, "end_frame": 3,
                                 "composite": "hurling_sport head none"}]), encoding="utf-8")
    with pytest.raises(ValidationError) as exc:
        parse_segment_labels(path, small_vocab)
    assert exc.value.path == "/0/composite"
