from commentary_align.numerics.checkpoint import checkpoint_id, load_checkpoint, save_checkpoint
from commentary_align.numerics.gradcheck import grad_check
from commentary_align.numerics.heads import (
    PARAM_ORDER,
    HeadGrads,
    MlpHead,
    ProjectionHeads,
    exact_linear_head,
    head_backward,
    head_forward,
    init_heads,
)
from commentary_align.numerics.optim import OptimizerState, adamw_step

__all__ = [
    "PARAM_ORDER",
    "HeadGrads",
    "MlpHead",
    "OptimizerState",
    "ProjectionHeads",
    "adamw_step",
    "checkpoint_id",
    "exact_linear_head",
    "grad_check",
    "head_backward",
    "head_forward",
    "init_heads",
    "load_checkpoint",
    "save_checkpoint",
]
