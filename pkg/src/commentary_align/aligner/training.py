"""
Training loop of the projection heads.

One optimizer step per commentary batch, batches of every match reshuffled
each epoch from the configured seed. Updates are applied serially in one
thread, so a run is a pure function of its dataset and config.
"""

import csv
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from tqdm import tqdm

from commentary_align.aligner.contrastive import contrastive_loss_and_grads, label_matrix
from commentary_align.aligner.sampling import (
    DEFAULT_NEGATIVE_GAP_S,
    DEFAULT_SAMPLE_FPS,
    DEFAULT_WINDOW_AFTER_S,
    DEFAULT_WINDOW_BEFORE_S,
    TrainBatch,
    sample_batches,
)
from commentary_align.core.errors import DataError, DimensionError, NumericError
from commentary_align.core.logging import get_logger
from commentary_align.core.types import MatchRecord
from commentary_align.numerics.checkpoint import save_checkpoint
from commentary_align.numerics.heads import DEFAULT_DIM, ProjectionHeads, init_heads
from commentary_align.numerics.optim import (
    DEFAULT_BETA1,
    DEFAULT_BETA2,
    DEFAULT_EPS,
    DEFAULT_LR,
    DEFAULT_WEIGHT_DECAY,
    OptimizerState,
    adamw_step,
)

logger = get_logger(__name__)


class TrainConfig(BaseModel):
    """Training settings; defaults are the reference alignment setup."""

    model_config = ConfigDict(extra="forbid")

    epochs: int = Field(default=50, ge=1)
    lr: float = Field(default=DEFAULT_LR, ge=0.0)
    seed: int = Field(default=0, ge=0)
    window_before_s: float = Field(default=DEFAULT_WINDOW_BEFORE_S, ge=0.0)
    window_after_s: float = Field(default=DEFAULT_WINDOW_AFTER_S, ge=0.0)
    negative_gap_s: float = Field(default=DEFAULT_NEGATIVE_GAP_S, ge=0.0)
    sample_fps: float = Field(default=DEFAULT_SAMPLE_FPS, gt=0.0)
    hidden_dim: int = Field(default=DEFAULT_DIM, ge=1)
    out_dim: int = Field(default=DEFAULT_DIM, ge=1)
    weight_decay: float = Field(default=DEFAULT_WEIGHT_DECAY, ge=0.0)
    beta1: float = Field(default=DEFAULT_BETA1, ge=0.0, lt=1.0)
    beta2: float = Field(default=DEFAULT_BETA2, ge=0.0, lt=1.0)
    eps: float = Field(default=DEFAULT_EPS, gt=0.0)
    checkpoint_path: Path | None = None
    loss_trace_path: Path | None = None
    show_progress: bool = False


@dataclass(frozen=True, eq=False)
class TrainResult:
    heads: ProjectionHeads
    loss_trace: list[float]
    num_batches: int


def batch_loss_and_grads(
    heads: ProjectionHeads, batch: TrainBatch
) -> tuple[float, dict[str, np.ndarray]]:
    """Loss and parameter gradients of a single commentary batch."""
    return contrastive_loss_and_grads(
        heads,
        batch.commentary_embedding[None, :],
        batch.candidate_frame_embeddings,
        label_matrix([batch.positive_index], batch.c),
    )


def collect_batches(dataset: Sequence[MatchRecord], config: TrainConfig) -> list[TrainBatch]:
    """Sample the batches of every match, each with its own derived seed."""
    batches: list[TrainBatch] = []
    for i, match in enumerate(dataset):
        batches.extend(
            sample_batches(
                match,
                rng_seed=[config.seed, i],
                window_before_s=config.window_before_s,
                window_after_s=config.window_after_s,
                negative_gap_s=config.negative_gap_s,
                fps=config.sample_fps,
            )
        )
    return batches


def write_loss_trace(loss_trace: Sequence[float], path: Path | str) -> Path:
    """Write the per-epoch loss trace as `epoch,mean_loss` CSV (epochs from 1)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["epoch", "mean_loss"])
        for epoch, loss in enumerate(loss_trace, start=1):
            writer.writerow([epoch, repr(float(loss))])
    return path


def train(
    dataset: Sequence[MatchRecord],
    config: TrainConfig | None = None,
    initial_heads: ProjectionHeads | None = None,
) -> TrainResult:
    """Train the text and visual heads with AdamW on the alignment loss.

    Args:
        dataset: Matches carrying ground truth and commentary embeddings.
        config: Training settings (defaults when omitted).
        initial_heads: Start from these heads instead of a seeded initialisation.

    Returns:
        TrainResult: Final heads, per-epoch mean loss, and batches per epoch.

    Raises:
        DataError: Empty dataset or inconsistent embedding widths.
        MissingGroundTruthError: A commentary has no `t_gt`.
        NumericError: Non-finite loss or gradient (epoch and batch are named).
    """
    config = config or TrainConfig()
    if not dataset:
        raise DataError("training needs at least one match")
    d_in = dataset[0].frames.d
    for match in dataset:
        if match.frames.d != d_in:
            raise DimensionError(
                f"match {match.match_id} has d={match.frames.d}, expected {d_in}"
            )

    heads = initial_heads or init_heads(
        d_in, config.hidden_dim, config.out_dim, seed=config.seed
    )
    if heads.dims[0] != d_in:
        raise DimensionError(f"heads expect d_in={heads.dims[0]}, features have d={d_in}")

    batches = collect_batches(dataset, config)
    logger.info(
        "Training on %d matches, %d batches per epoch, %d epochs, lr=%g",
        len(dataset),
        len(batches),
        config.epochs,
        config.lr,
    )

    state = OptimizerState(
        lr=config.lr,
        beta1=config.beta1,
        beta2=config.beta2,
        eps=config.eps,
        weight_decay=config.weight_decay,
    )
    loss_trace: list[float] = []
    for epoch in tqdm(range(config.epochs), desc="epochs", disable=not config.show_progress):
        order = np.random.default_rng([config.seed, epoch, 1]).permutation(len(batches))
        losses = np.empty(len(batches), dtype=np.float64)
        for step, b in enumerate(order):
            loss, grads = batch_loss_and_grads(heads, batches[b])
            if not np.isfinite(loss):
                raise NumericError(f"non-finite loss at epoch {epoch + 1}, batch {step}")
            try:
                params, state = adamw_step(state, heads.parameters(), grads)
            except NumericError as exc:
                raise NumericError(f"epoch {epoch + 1}, batch {step}: {exc}") from exc
            heads = ProjectionHeads.from_parameters(params, seed=heads.seed)
            losses[step] = loss

        loss_trace.append(float(losses.mean()))
        logger.info("Epoch %d/%d mean loss %.6f", epoch + 1, config.epochs, loss_trace[-1])

    if config.checkpoint_path is not None:
        save_checkpoint(heads, config.checkpoint_path)
    if config.loss_trace_path is not None:
        write_loss_trace(loss_trace, config.loss_trace_path)
        logger.info("Loss trace written to %s", config.loss_trace_path)
    return TrainResult(heads=heads, loss_trace=loss_trace, num_batches=len(batches))
