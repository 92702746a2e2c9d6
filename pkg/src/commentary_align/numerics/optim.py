"""
AdamW with decoupled weight decay.

One step, for every parameter block p with gradient g:

    p ← p − lr·wd·p
    m ← β1·m + (1 − β1)·g
    v ← β2·v + (1 − β2)·g²
    p ← p − lr · (m / (1 − β1^t)) / (sqrt(v / (1 − β2^t)) + eps)

Moments are accumulated in float64; updated parameters keep their own dtype.
The state has a single owner: the training loop that created it.
"""

from dataclasses import dataclass, field

import numpy as np

from commentary_align.core.errors import DimensionError, NumericError

DEFAULT_LR = 5e-4
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPS = 1e-8
DEFAULT_WEIGHT_DECAY = 0.01


@dataclass
class OptimizerState:
    """AdamW hyper-parameters plus per-block moment accumulators."""

    lr: float = DEFAULT_LR
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    eps: float = DEFAULT_EPS
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adamw_step(
    state: OptimizerState,
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
) -> tuple[dict[str, np.ndarray], OptimizerState]:
    """Apply one AdamW update.

    Args:
        state: Current optimizer state; left untouched.
        params: Parameter blocks by name.
        grads: Gradients, same names and shapes as `params`.

    Returns:
        tuple: (updated parameter blocks, new state with `step` incremented).

    Raises:
        DimensionError: If names or shapes of `grads` do not match `params`.
        NumericError: If a gradient block holds a non-finite value (the block is named).
    """
    if set(grads) != set(params):
        raise DimensionError(
            f"gradient blocks {sorted(grads)} do not match parameter blocks {sorted(params)}"
        )
    for name, grad in grads.items():
        if grad.shape != params[name].shape:
            raise DimensionError(f"{name}: gradient {grad.shape} vs parameter {params[name].shape}")
        if not np.all(np.isfinite(grad)):
            raise NumericError(f"non-finite gradient in parameter block {name}")

    step = state.step + 1
    bias1 = 1.0 - state.beta1**step
    bias2 = 1.0 - state.beta2**step

    new_params: dict[str, np.ndarray] = {}
    new_m: dict[str, np.ndarray] = {}
    new_v: dict[str, np.ndarray] = {}
    for name, param in params.items():
        grad = grads[name].astype(np.float64)
        m = state.m.get(name, np.zeros(param.shape))
        v = state.v.get(name, np.zeros(param.shape))
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * grad * grad

        p = param.astype(np.float64)
        p = p - state.lr * state.weight_decay * p
        p = p - state.lr * (m / bias1) / (np.sqrt(v / bias2) + state.eps)

        new_params[name] = p.astype(param.dtype)
        new_m[name] = m
        new_v[name] = v

    new_state = OptimizerState(
        lr=state.lr,
        beta1=state.beta1,
        beta2=state.beta2,
        eps=state.eps,
        weight_decay=state.weight_decay,
        step=step,
        m=new_m,
        v=new_v,
    )
    return new_params, new_state
