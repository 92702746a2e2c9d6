"""
Training-batch sampling around annotated timestamps.

For each commentary, the key frame nearest its ground-truth time is the
positive. Frames on the 1 FPS grid whose distance to the ground truth lies
in [negative_gap_s, window] are negatives; frames closer than the gap are
left out of the batch entirely. Windows are clipped to [0, duration].
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from commentary_align.core.errors import DataError, EmptyWindowError, MissingGroundTruthError
from commentary_align.core.logging import get_logger
from commentary_align.core.types import MatchRecord

logger = get_logger(__name__)

DEFAULT_WINDOW_BEFORE_S = 60.0
DEFAULT_WINDOW_AFTER_S = 60.0
DEFAULT_NEGATIVE_GAP_S = 5.0
DEFAULT_SAMPLE_FPS = 1.0


@dataclass(frozen=True, eq=False)
class TrainBatch:
    """One commentary and its candidate frames.

    Attributes:
        commentary_embedding: (d,) pre-projection text embedding.
        candidate_frame_embeddings: (c, d) pre-projection frame embeddings, time-ordered.
        positive_index: Row of the positive frame among the candidates.
        candidate_timestamps: (c,) frame times (s).
        match_id: Source match.
        commentary_index: Source commentary within the match.
    """

    commentary_embedding: np.ndarray
    candidate_frame_embeddings: np.ndarray
    positive_index: int
    candidate_timestamps: np.ndarray
    match_id: str = ""
    commentary_index: int = -1

    @property
    def c(self) -> int:
        return int(self.candidate_timestamps.shape[0])


def nearest_index(timestamps: np.ndarray, t: float) -> int:
    """Index of the timestamp nearest `t`; an exact midpoint resolves to the earlier one."""
    right = int(np.searchsorted(timestamps, t, side="left"))
    if right == 0:
        return 0
    if right == timestamps.shape[0]:
        return right - 1
    left = right - 1
    return left if t - timestamps[left] <= timestamps[right] - t else right


def sample_batches(
    match: MatchRecord,
    rng_seed: int | Sequence[int],
    window_before_s: float = DEFAULT_WINDOW_BEFORE_S,
    window_after_s: float = DEFAULT_WINDOW_AFTER_S,
    negative_gap_s: float = DEFAULT_NEGATIVE_GAP_S,
    fps: float = DEFAULT_SAMPLE_FPS,
) -> list[TrainBatch]:
    """Build one training batch per commentary, shuffled by `rng_seed`.

    Raises:
        DataError: If the match has no commentary embeddings.
        MissingGroundTruthError: If a commentary has no `t_gt`.
        EmptyWindowError: If no frame lies in a commentary's clipped window.
    """
    if match.text_features is None:
        raise DataError(f"match {match.match_id}: commentary embeddings are required for training")

    grid = match.frames.grid(fps)
    times = match.frames.timestamps[grid]
    features = match.frames.features[grid]

    batches: list[TrainBatch] = []
    for i, item in enumerate(match.commentaries):
        if item.t_gt is None:
            raise MissingGroundTruthError(f"match {match.match_id}: commentary {i} has no t_gt")

        start = max(0.0, item.t_gt - window_before_s)
        end = min(match.duration_s, item.t_gt + window_after_s)
        in_window = np.flatnonzero((times >= start) & (times <= end))
        if in_window.size == 0:
            raise EmptyWindowError(i, start, end)

        positive = nearest_index(times, item.t_gt)
        distance = np.abs(times[in_window] - item.t_gt)
        negatives = in_window[(distance >= negative_gap_s) & (in_window != positive)]
        candidates = np.union1d(negatives, [positive])
        if candidates.size < 2:
            logger.debug("Match %s commentary %d has no negatives", match.match_id, i)

        batches.append(
            TrainBatch(
                commentary_embedding=match.text_features[i],
                candidate_frame_embeddings=features[candidates],
                positive_index=int(np.searchsorted(candidates, positive)),
                candidate_timestamps=times[candidates],
                match_id=match.match_id,
                commentary_index=i,
            )
        )

    order = np.random.default_rng(rng_seed).permutation(len(batches))
    return [batches[j] for j in order]
