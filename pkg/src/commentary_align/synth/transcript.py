"""
Synthetic narration transcripts for generated matches.

Each planted event gets one narration segment starting within the first
second after t_gt and ending no later than the 10-second bin it starts in.
Filler segments are scattered uniformly over the half.
"""

import math
from collections.abc import Sequence

import numpy as np

from commentary_align.coarse.transcript import DEFAULT_BIN_S, AsrSegment
from commentary_align.core.types import MatchRecord
from commentary_align.synth.generator import GroundTruthMap
from commentary_align.synth.vocabulary import FILLER_LINES

EVENT_SEGMENT_S = 3.0
EVENT_JITTER_S = 0.9
FILLER_SEGMENT_S = (2.0, 4.0)


def write_transcript(
    match: MatchRecord,
    gt_map: GroundTruthMap,
    vocab_seed: int | Sequence[int],
    filler_per_min: float = 2.0,
    bin_s: float = DEFAULT_BIN_S,
) -> list[AsrSegment]:
    """Transcript segments of `match`, sorted by start.

    With `filler_per_min` 0 the transcript has exactly one segment per
    commentary.
    """
    rng = np.random.default_rng(vocab_seed)
    times = match.frames.timestamps
    segments: list[AsrSegment] = []

    for i, event in enumerate(gt_map.events):
        t_gt = float(times[gt_map.frame_indices[i]])
        start = t_gt + float(rng.uniform(0.0, EVENT_JITTER_S))
        bin_end = (math.floor(start / bin_s) + 1) * bin_s
        end = min(start + EVENT_SEGMENT_S, bin_end, match.duration_s)
        segments.append(
            AsrSegment(start=start, end=max(start, end), text=event.narration(int(rng.integers(2))))
        )

    count = int(round(filler_per_min * match.duration_s / 60.0))
    if count:
        lengths = rng.uniform(*FILLER_SEGMENT_S, size=count)
        starts = rng.uniform(0.0, max(0.0, match.duration_s - FILLER_SEGMENT_S[1]), size=count)
        lines = rng.integers(len(FILLER_LINES), size=count)
        segments.extend(
            AsrSegment(start=float(s), end=float(s + length), text=FILLER_LINES[line])
            for s, length, line in zip(starts, lengths, lines)
        )
    return sorted(segments, key=lambda segment: segment.start)
