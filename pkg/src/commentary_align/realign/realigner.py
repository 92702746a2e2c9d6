"""
Inference-time timestamp correction.

Each commentary is projected with the text head and compared with every key
frame in the asymmetric window [t − before_s, t + after_s], clipped to the
half. The commentary moves to the frame with the highest cosine similarity.
Commentaries are aligned independently of each other.

Scores within `TIE_TOLERANCE` of the window maximum count as ties, and ties go
to the earliest frame: a replay shows the event again later, and ground truth
is the first occurrence.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from commentary_align.aligner.contrastive import affinity
from commentary_align.core.errors import DataError, DimensionError, EmptyWindowError
from commentary_align.core.logging import get_logger
from commentary_align.core.metrics import DEFAULT_WINDOWS, OffsetStats, compute_offset_stats
from commentary_align.core.types import MatchRecord
from commentary_align.numerics.heads import ProjectionHeads

logger = get_logger(__name__)

DEFAULT_BEFORE_S = 45.0
DEFAULT_AFTER_S = 30.0
TIE_TOLERANCE = 1e-12


class RealignConfig(BaseModel):
    """Candidate window and frame grid used at inference."""

    model_config = ConfigDict(extra="forbid")

    before_s: float = Field(default=DEFAULT_BEFORE_S, ge=0.0)
    after_s: float = Field(default=DEFAULT_AFTER_S, ge=0.0)
    fps: float = Field(default=1.0, gt=0.0)
    tie_break: Literal["earliest"] = "earliest"


@dataclass(frozen=True)
class ChosenFrame:
    """Outcome for one commentary.

    Attributes:
        commentary_index: Position of the commentary in the match.
        source_t: Timestamp read from the match file.
        coarse_t: Stage-one prediction, None when the coarse stage did not run.
        aligned_t: Timestamp of the chosen key frame.
        frame_index: Row of the chosen frame in the feature file.
        score: Cosine similarity of the chosen frame.
    """

    commentary_index: int
    source_t: float
    coarse_t: float | None
    aligned_t: float
    frame_index: int
    score: float


@dataclass(frozen=True, eq=False)
class AlignmentReport:
    """Per-commentary choices of one match plus the stages that produced them."""

    match_id: str
    rows: list[ChosenFrame]
    coarse_mode: str = "off"
    fine: bool = True
    config: RealignConfig = field(default_factory=RealignConfig)
    stats: OffsetStats | None = None

    def aligned_times(self) -> np.ndarray:
        return np.array([row.aligned_t for row in self.rows], dtype=np.float64)

    def frame_indices(self) -> np.ndarray:
        return np.array([row.frame_index for row in self.rows], dtype=np.int64)


def _projected(match: MatchRecord, heads: ProjectionHeads) -> tuple[np.ndarray, np.ndarray]:
    if match.text_features is None:
        raise DataError(f"match {match.match_id}: commentary embeddings are required to realign")
    if heads.dims[0] != match.frames.d:
        raise DimensionError(
            f"heads expect d={heads.dims[0]} but match {match.match_id} has d={match.frames.d}"
        )
    return heads.project_text(match.text_features), heads.project_visual(match.frames.features)


def earliest_argmax(scores: np.ndarray) -> int:
    """First position whose score is within `TIE_TOLERANCE` of the maximum."""
    return int(np.flatnonzero(scores >= scores.max() - TIE_TOLERANCE)[0])


def candidate_window(
    times: np.ndarray, center: float, before_s: float, after_s: float, duration_s: float
) -> np.ndarray:
    """Positions of `times` inside [center − before_s, center + after_s] ∩ [0, duration_s]."""
    start = max(0.0, center - before_s)
    end = min(duration_s, center + after_s)
    return np.flatnonzero((times >= start) & (times <= end))


def realign_match(
    match: MatchRecord,
    heads: ProjectionHeads,
    cfg: RealignConfig | None = None,
    centers: Sequence[float] | np.ndarray | None = None,
) -> AlignmentReport:
    """Move every commentary to its best-scoring frame in the candidate window.

    Args:
        match: Match with commentary embeddings.
        heads: Trained projection heads.
        cfg: Window and grid settings.
        centers: Window centres, one per commentary; defaults to the source `t`.

    Raises:
        DataError: If the match has no commentary embeddings.
        DimensionError: If the heads do not fit the feature width.
        EmptyWindowError: If a clipped window holds no frame.
    """
    cfg = cfg or RealignConfig()
    centers = match.source_times() if centers is None else np.asarray(centers, dtype=np.float64)
    if centers.shape != (match.k,):
        raise DimensionError(f"expected {match.k} window centres, got {centers.shape}")

    grid = match.frames.grid(cfg.fps)
    times = match.frames.timestamps[grid]
    text, visual = _projected(match, heads)
    scores = affinity(text, visual[grid])

    rows = []
    for i, center in enumerate(centers):
        window = candidate_window(times, center, cfg.before_s, cfg.after_s, match.duration_s)
        if window.size == 0:
            raise EmptyWindowError(
                i, max(0.0, center - cfg.before_s), min(match.duration_s, center + cfg.after_s)
            )
        best = window[earliest_argmax(scores[i, window])]
        rows.append(
            ChosenFrame(
                commentary_index=i,
                source_t=match.commentaries[i].t,
                coarse_t=None,
                aligned_t=float(times[best]),
                frame_index=int(grid[best]),
                score=float(scores[i, best]),
            )
        )

    report = AlignmentReport(match_id=match.match_id, rows=rows, config=cfg)
    logger.debug("Realigned %d commentaries of match %s", match.k, match.match_id)
    return report


def brute_force_align(
    match: MatchRecord,
    heads: ProjectionHeads,
    window: RealignConfig | None = None,
) -> np.ndarray:
    """Exhaustive per-commentary argmax, one commentary at a time.

    Without `window`, every frame of the half is a candidate. With it, the
    scan is restricted to that window around the source `t`.
    """
    text, visual = _projected(match, heads)
    times = match.frames.timestamps
    if window is not None:
        grid = match.frames.grid(window.fps)
        times, visual = times[grid], visual[grid]

    chosen = np.empty(match.k, dtype=np.float64)
    for i, item in enumerate(match.commentaries):
        row = affinity(text[i : i + 1], visual)[0]
        if window is None:
            candidates = np.arange(times.shape[0])
        else:
            candidates = candidate_window(
                times, item.t, window.before_s, window.after_s, match.duration_s
            )
            if candidates.size == 0:
                raise EmptyWindowError(
                    i,
                    max(0.0, item.t - window.before_s),
                    min(match.duration_s, item.t + window.after_s),
                )
        chosen[i] = times[candidates[earliest_argmax(row[candidates])]]
    return chosen


def with_stats(
    report: AlignmentReport, match: MatchRecord, windows: Sequence[float] = DEFAULT_WINDOWS
) -> AlignmentReport:
    """Attach offset statistics when the match carries ground truth."""
    if not match.has_ground_truth:
        return report
    stats = compute_offset_stats(report.aligned_times(), match.ground_truth_times(), windows)
    return AlignmentReport(
        match_id=report.match_id,
        rows=report.rows,
        coarse_mode=report.coarse_mode,
        fine=report.fine,
        config=report.config,
        stats=stats,
    )
