from commentary_align.aligner.contrastive import (
    affinity,
    affinity_backward,
    align_loss,
    contrastive_loss_and_grads,
    label_matrix,
)
from commentary_align.aligner.sampling import TrainBatch, nearest_index, sample_batches
from commentary_align.aligner.training import (
    TrainConfig,
    TrainResult,
    batch_loss_and_grads,
    train,
    write_loss_trace,
)

__all__ = [
    "TrainBatch",
    "TrainConfig",
    "TrainResult",
    "affinity",
    "affinity_backward",
    "align_loss",
    "batch_loss_and_grads",
    "contrastive_loss_and_grads",
    "label_matrix",
    "nearest_index",
    "sample_batches",
    "train",
    "write_loss_trace",
]
