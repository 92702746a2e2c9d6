"""
Synthetic matches with planted ground truth.

A hidden random rotation M, shared by every match generated from the same
master seed, links the two modalities: the key frame of commentary i at
t_gt holds normalize(M·c_i + σ·ε) with ε ~ N(0, I/d), every other frame is a
random unit vector. Source timestamps are t_gt plus a calibrated offset,
rounded to whole seconds as broadcast commentary is.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.stats import ortho_group

from commentary_align.core.logging import get_logger
from commentary_align.core.types import CommentaryItem, FrameFeatureSequence, MatchRecord
from commentary_align.numerics.heads import ProjectionHeads, exact_linear_head
from commentary_align.synth.calibration import (
    OFFSET_ABSMEAN_S,
    OFFSET_MEAN_S,
    OFFSET_RANGE_S,
    calibrate_offset_sigma,
    sample_offsets,
)
from commentary_align.synth.vocabulary import PlantedEvent, draw_events

logger = get_logger(__name__)

REPLAY_DELAY_S = (15, 25)


class SynthConfig(BaseModel):
    """Shape of a synthetic dataset; offset defaults are the statistics of real commentary feeds."""

    model_config = ConfigDict(extra="forbid")

    num_matches: int = Field(default=44, ge=1)
    val_matches: int = Field(default=0, ge=0)
    test_matches: int = Field(default=4, ge=0)
    commentaries_per_match: int = Field(default=60, ge=1)
    duration_s: float = Field(default=2700.0, gt=0.0)
    d: int = Field(default=512, ge=1)
    offset_mean_s: float = OFFSET_MEAN_S
    offset_absmean_target_s: float = Field(default=OFFSET_ABSMEAN_S, gt=0.0)
    offset_range_s: tuple[float, float] = OFFSET_RANGE_S
    offset_sigma_s: float | None = Field(default=None, gt=0.0)
    noise_sigma: float = Field(default=0.0, ge=0.0)
    replay_prob: float = Field(default=0.0, ge=0.0, le=1.0)
    edge_margin_s: float = Field(default=60.0, ge=0.0)
    filler_per_min: float = Field(default=2.0, ge=0.0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _consistent(self) -> "SynthConfig":
        lo, hi = self.offset_range_s
        if not lo < 0.0 < hi:
            raise ValueError(f"offset_range_s must contain 0, got {self.offset_range_s}")
        if not lo < self.offset_mean_s < hi:
            raise ValueError("offset_mean_s must lie inside offset_range_s")
        slots = int(self.duration_s) - 2 * int(self.edge_margin_s)
        if slots < self.commentaries_per_match:
            raise ValueError(
                f"{self.commentaries_per_match} commentaries do not fit in {slots} usable seconds"
            )
        if self.val_matches + self.test_matches > self.num_matches:
            raise ValueError("val_matches + test_matches exceeds num_matches")
        return self

    def offset_sigma(self) -> float:
        """σ_Δ as configured, or calibrated to the abs-mean target."""
        if self.offset_sigma_s is not None:
            return self.offset_sigma_s
        return calibrate_offset_sigma(
            self.offset_mean_s, self.offset_absmean_target_s, tuple(self.offset_range_s)
        )

    def match_id(self, index: int) -> str:
        return f"synth-{self.seed:04d}-{index:03d}"


@dataclass(frozen=True, eq=False)
class GroundTruthMap:
    """What the generator planted in one match.

    Attributes:
        M: (d, d) hidden rotation from commentary to frame space.
        frame_indices: (k,) row of each commentary's planted key frame.
        replay_indices: (k,) row of its replay copy, −1 when none.
        events: The templated event behind each commentary.
    """

    M: np.ndarray
    frame_indices: np.ndarray
    replay_indices: np.ndarray
    events: list[PlantedEvent]

    def perfect_heads(self) -> ProjectionHeads:
        """Heads scoring text against frames exactly through M (text·Mᵀ vs identity)."""
        d = self.M.shape[0]
        return ProjectionHeads(
            text=exact_linear_head(self.M.T), visual=exact_linear_head(np.eye(d))
        )


@lru_cache(maxsize=4)
def hidden_map(d: int, seed: int) -> np.ndarray:
    """The shared rotation of a dataset; read-only."""
    if d == 1:
        M = np.ones((1, 1))
    else:
        M = ortho_group.rvs(d, random_state=np.random.default_rng([seed, d]))
    M = np.asarray(M, dtype=np.float64)
    M.flags.writeable = False
    return M


def _unit_rows(X: np.ndarray) -> np.ndarray:
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def generate_match(
    cfg: SynthConfig, match_seed: int | Sequence[int], index: int = 0
) -> tuple[MatchRecord, GroundTruthMap]:
    """Generate one match half; a pure function of (cfg, match_seed, index).

    Args:
        cfg: Dataset shape.
        match_seed: Seed of this match's random stream.
        index: Position in the dataset, used for the match id.

    Returns:
        The match (with t_gt on every commentary) and what was planted in it.
    """
    rng = np.random.default_rng(match_seed)
    k, d = cfg.commentaries_per_match, cfg.d
    n = int(cfg.duration_s)
    margin = int(cfg.edge_margin_s)
    M = hidden_map(d, cfg.seed)

    frames = _unit_rows(rng.standard_normal((n, d)))
    t_gt = np.sort(rng.choice(np.arange(margin, n - margin), size=k, replace=False))

    text = _unit_rows(rng.standard_normal((k, d)))
    noise = rng.standard_normal((k, d)) / np.sqrt(d)
    planted = _unit_rows(text @ M.T + cfg.noise_sigma * noise)
    frames[t_gt] = planted

    replay_draws = rng.random(k)
    replay_delays = rng.integers(REPLAY_DELAY_S[0], REPLAY_DELAY_S[1] + 1, size=k)
    occupied = set(t_gt.tolist())
    replay_indices = np.full(k, -1, dtype=np.int64)
    for i in range(k):
        if replay_draws[i] >= cfg.replay_prob:
            continue
        position = int(t_gt[i] + replay_delays[i])
        if position >= n or position in occupied:
            continue
        frames[position] = planted[i]
        replay_indices[i] = position
        occupied.add(position)

    offsets = sample_offsets(
        k, cfg.offset_mean_s, cfg.offset_sigma(), tuple(cfg.offset_range_s), rng
    )
    t = np.clip(np.round(t_gt + offsets), 0.0, cfg.duration_s)

    events = draw_events(rng, k)
    commentaries = [
        CommentaryItem(text=event.commentary(), t=float(t[i]), t_gt=float(t_gt[i]))
        for i, event in enumerate(events)
    ]
    match = MatchRecord(
        match_id=cfg.match_id(index),
        half=1 + index % 2,
        duration_s=cfg.duration_s,
        commentaries=commentaries,
        frames=FrameFeatureSequence(
            np.arange(n, dtype=np.float64), frames.astype(np.float32), fps=1.0
        ),
        text_features=text.astype(np.float32),
        provenance={
            "generator": "synth",
            "seed": cfg.seed,
            "match_seed": list(np.atleast_1d(match_seed).tolist()),
            "noise_sigma": cfg.noise_sigma,
            "replay_prob": cfg.replay_prob,
            "offset_sigma_s": cfg.offset_sigma(),
        },
    )
    gt_map = GroundTruthMap(
        M=M, frame_indices=t_gt.astype(np.int64), replay_indices=replay_indices, events=events
    )
    logger.debug(
        "Generated %s: k=%d, n=%d, %d replays", match.match_id, k, n, int(np.sum(replay_indices >= 0))
    )
    return match, gt_map
