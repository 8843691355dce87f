#!/usr/bin/env python3
"""
Summarize how long-tailed the part states of an annotation file are.

Usage:
    python scripts/long_tail_report.py ANNOTATIONS [--durations 1,3,5,10] [--top N]

Sections:
    per group       share of the most frequent state and of "none"
    top states      the N most frequent states over all part instances
    broadcast       accuracy of segment labels broadcast to frames, per duration
    cost            frame-mode vs segment-mode recognizer TFLOPs
"""

import sys
from collections import Counter
from pathlib import Path

# Add parent directory to path for imports
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from pap import config  # noqa: E402  (loads .env)
from pap.anno import parse_dataset  # noqa: E402
from pap.evaluator import CostMode, cost_model, cost_reduction  # noqa: E402
from pap.segmenter import broadcast_accuracy  # noqa: E402
from pap.types import PartGroup  # noqa: E402
from pap.validation import ValidationError  # noqa: E402

VIDEO_LENGTHS = (10.0, 30.0, 60.0, 120.0)


def state_counts(videos) -> dict[PartGroup, Counter]:
    counts = {group: Counter() for group in PartGroup}
    for video in videos:
        for frame in video.frames:
            for person in frame.persons:
                for part in person.parts:
                    counts[part.group][part.state] += 1
    return counts


def show_groups(counts: dict[PartGroup, Counter], vocab):
    print("\n=== PART GROUPS ===\n")
    print(f"{'Group':<8} {'Parts':>8} {'Top state':<16} {'Top share':>10} {'none':>8}")
    print("-" * 54)
    for group, counter in counts.items():
        total = sum(counter.values())
        if not total:
            print(f"{group.value:<8} {0:>8}")
            continue
        state, top = counter.most_common(1)[0]
        print(f"{group.value:<8} {total:>8} {vocab.part_states[state]:<16} "
              f"{top / total:>10.2%} {counter[0] / total:>8.2%}")


def show_top_states(counts: dict[PartGroup, Counter], vocab, top: int):
    pooled = Counter()
    for counter in counts.values():
        pooled.update(counter)
    total = sum(pooled.values())
    print(f"\n=== TOP {top} STATES ===\n")
    cumulative = 0
    for state, n in pooled.most_common(top):
        cumulative += n
        print(f"  {vocab.part_states[state]:<24} {n:>8} {n / total:>8.2%} (cumulative {cumulative / total:.2%})")
    print(f"\n  {len(pooled)} of {len(vocab.part_states)} states observed")


def show_broadcast(videos, durations: list[float]):
    print("\n=== SEGMENT BROADCAST ACCURACY ===\n")
    print(f"{'Duration':>9} " + " ".join(f"{g.value:>7}" for g in PartGroup))
    for duration in durations:
        accuracy = broadcast_accuracy(videos, duration)
        print(f"{duration:>8g}s " + " ".join(f"{accuracy[g]:>7.2%}" for g in PartGroup))


def show_cost(durations: list[float]):
    print("\n=== RECOGNIZER COST (TFLOPs) ===\n")
    print(f"{'Video':>7} {'frame':>8} " + " ".join(f"{f'{d:g}s seg':>9}" for d in durations))
    for length in VIDEO_LENGTHS:
        frame = cost_model(length, CostMode.FRAME)
        cells = [f"{cost_model(length, CostMode.SEGMENT, d):>5.1f} ({cost_reduction(length, d):.0%})"
                 for d in durations]
        print(f"{length:>6g}s {frame:>8.1f} " + " ".join(f"{c:>9}" for c in cells))


def main():
    args = sys.argv[1:]
    if not args or args[0].startswith("-"):
        print(__doc__)
        sys.exit(2)

    durations = [config.SEGMENT_DURATION]
    if "--durations" in args:
        idx = args.index("--durations")
        if idx + 1 < len(args):
            durations = [float(d) for d in args[idx + 1].split(",")]

    top = 10
    if "--top" in args:
        idx = args.index("--top")
        if idx + 1 < len(args):
            top = int(args[idx + 1])

    try:
        vocab, videos = parse_dataset(args[0])
    except ValidationError as e:
        print(f"Error: {e}")
        sys.exit(1)

    print(f"{len(videos)} videos from {args[0]}")
    counts = state_counts(videos)
    show_groups(counts, vocab)
    show_top_states(counts, vocab, top)
    show_broadcast(videos, durations)
    show_cost(durations)


if __name__ == "__main__":
    main()
