"""
Domain types shared by every stage of the alignment pipeline.

All timestamps are float seconds relative to the start of a half. A match
half is the unit of work: halves are stored as separate videos and are never
aligned across each other.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from commentary_align.core.errors import InvariantError, MissingGroundTruthError

# Commentaries may trail the nominal half length by this much (stoppage time)
STOPPAGE_TOLERANCE_S = 300.0


class CommentaryItem(BaseModel):
    """One textual commentary with its noisy and corrected timestamps."""

    model_config = ConfigDict(frozen=True)

    text: str = Field(min_length=1)
    t: float = Field(ge=0.0, description="Noisy source timestamp (s)")
    t_gt: float | None = Field(default=None, ge=0.0, description="Annotated ground truth (s)")
    t_coarse: float | None = Field(default=None, description="Stage-one prediction (s)")
    t_aligned: float | None = Field(default=None, description="Realigned timestamp (s)")


def display_time(half: int, t: float) -> str:
    """Render the derived "H - MM:SS" display string of a timestamp."""
    total = int(t)
    return f"{half} - {total // 60:02d}:{total % 60:02d}"


@dataclass(frozen=True, eq=False)
class FrameFeatureSequence:
    """Key-frame embeddings and their timestamps.

    Attributes:
        timestamps: (n,) strictly increasing seconds.
        features: (n, d) finite embeddings, one row per key frame.
        fps: Sampling rate the frames were extracted at.
    """

    timestamps: np.ndarray
    features: np.ndarray
    fps: float = 1.0

    def __post_init__(self) -> None:
        timestamps = np.asarray(self.timestamps, dtype=np.float64)
        features = np.asarray(self.features)
        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "features", features)

        if timestamps.ndim != 1:
            raise InvariantError("timestamps", "must be one-dimensional")
        if features.ndim != 2:
            raise InvariantError("features", "must be a 2-D matrix")
        if features.shape[0] != timestamps.shape[0]:
            raise InvariantError(
                "features",
                f"row count {features.shape[0]} != timestamp count {timestamps.shape[0]}",
            )
        if timestamps.size and not np.all(np.isfinite(timestamps)):
            raise InvariantError("timestamps", "contain non-finite values")
        if np.any(np.diff(timestamps) <= 0):
            raise InvariantError("timestamps", "timestamps not strictly increasing")
        if not np.all(np.isfinite(features)):
            bad_row = int(np.argwhere(~np.isfinite(features))[0, 0])
            raise InvariantError(f"features.{bad_row}", "row has non-finite entries")
        if self.fps <= 0:
            raise InvariantError("fps", f"must be positive, got {self.fps}")

    @property
    def n(self) -> int:
        return int(self.timestamps.shape[0])

    @property
    def d(self) -> int:
        return int(self.features.shape[1])

    def grid(self, fps: float) -> np.ndarray:
        """Indices of the frames lying on an `fps` grid.

        Frames are never resampled: when the file is denser than `fps`, every
        `round(self.fps / fps)`-th frame is kept.
        """
        stride = max(1, int(round(self.fps / fps)))
        return np.arange(0, self.n, stride)


@dataclass(frozen=True, eq=False)
class MatchRecord:
    """One match half: commentary stream plus key-frame features.

    Attributes:
        match_id: Stable identifier of the match.
        half: 1 or 2.
        duration_s: Nominal length of the half video.
        commentaries: The k commentaries, in file order.
        frames: Key-frame features of the half.
        text_features: (k, d) precomputed commentary embeddings, if available.
        asr_path: Transcript file of the half, if the video has narration audio.
        provenance: Free-form record of how the timestamps were produced.
    """

    match_id: str
    half: int
    duration_s: float
    commentaries: list[CommentaryItem]
    frames: FrameFeatureSequence
    text_features: np.ndarray | None = None
    asr_path: Path | None = None
    provenance: dict[str, Any] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.half not in (1, 2):
            raise InvariantError("half", f"must be 1 or 2, got {self.half}")
        if self.duration_s <= 0:
            raise InvariantError("duration_s", f"must be positive, got {self.duration_s}")
        if not self.commentaries:
            raise InvariantError("commentaries", "at least one commentary is required")

        limit = self.duration_s + STOPPAGE_TOLERANCE_S
        for i, item in enumerate(self.commentaries):
            if item.t > limit:
                raise InvariantError(f"commentaries.{i}.t", f"{item.t} exceeds {limit}")
            if item.t_gt is not None and item.t_gt > limit:
                raise InvariantError(f"commentaries.{i}.t_gt", f"{item.t_gt} exceeds {limit}")

        if self.text_features is not None:
            text_features = np.asarray(self.text_features)
            object.__setattr__(self, "text_features", text_features)
            if text_features.shape != (self.k, self.frames.d):
                raise InvariantError(
                    "commentary_features",
                    f"expected shape {(self.k, self.frames.d)}, got {text_features.shape}",
                )
            if not np.all(np.isfinite(text_features)):
                raise InvariantError("commentary_features", "contain non-finite values")

    @property
    def k(self) -> int:
        return len(self.commentaries)

    @property
    def has_ground_truth(self) -> bool:
        return all(item.t_gt is not None for item in self.commentaries)

    def source_times(self) -> np.ndarray:
        return np.array([item.t for item in self.commentaries], dtype=np.float64)

    def ground_truth_times(self) -> np.ndarray:
        """Annotated timestamps of every commentary.

        Raises:
            MissingGroundTruthError: If any commentary lacks `t_gt`.
        """
        missing = [i for i, item in enumerate(self.commentaries) if item.t_gt is None]
        if missing:
            raise MissingGroundTruthError(
                f"match {self.match_id}: commentaries {missing[:5]} have no t_gt"
            )
        return np.array([item.t_gt for item in self.commentaries], dtype=np.float64)

    def aligned_times(self) -> np.ndarray:
        """Realigned timestamps, falling back to the source `t` where unset."""
        return np.array(
            [item.t if item.t_aligned is None else item.t_aligned for item in self.commentaries],
            dtype=np.float64,
        )

    def with_commentaries(self, commentaries: list[CommentaryItem]) -> "MatchRecord":
        return replace(self, commentaries=commentaries)
