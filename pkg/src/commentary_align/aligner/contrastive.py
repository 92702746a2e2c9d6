"""
Fine-grained contrastive alignment objective.

The affinity between projected commentaries C (k, d) and projected frames
V (n, d) is their cosine similarity matrix Â (k, n). With a binary label
matrix Y marking each commentary's ground-truth frame(s), the loss is

    L = −(1/k) Σ_i log( Σ_j Y[i,j]·exp(Â[i,j]) / Σ_j exp(Â[i,j]) )

computed with log-sum-exp on both sums. The temperature is 1: raw cosines
are exponentiated. Loss and affinity arithmetic is float64.
"""

from collections.abc import Sequence

import numpy as np

from commentary_align.core.errors import DataError, DimensionError, ZeroNormError
from commentary_align.numerics.heads import ProjectionHeads, head_backward, head_forward


def _row_norms(X: np.ndarray, side: str) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ZeroNormError(side, int(zero[0]))
    return norms


def affinity(C: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Cosine similarity matrix Â[i, j] = C_i·V_j / (‖C_i‖·‖V_j‖).

    Raises:
        DimensionError: If C and V differ in embedding width.
        ZeroNormError: If a row of C ("commentary") or V ("frame") has zero norm.
    """
    C = np.asarray(C, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    if C.ndim != 2 or V.ndim != 2 or C.shape[1] != V.shape[1]:
        raise DimensionError(f"affinity needs (k, d) and (n, d), got {C.shape} and {V.shape}")
    C_unit = C / _row_norms(C, "commentary")[:, None]
    V_unit = V / _row_norms(V, "frame")[:, None]
    return C_unit @ V_unit.T


def affinity_backward(
    C: np.ndarray, V: np.ndarray, dA: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of a loss w.r.t. C and V given dL/dÂ."""
    C = np.asarray(C, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    c_norm = _row_norms(C, "commentary")[:, None]
    v_norm = _row_norms(V, "frame")[:, None]
    C_unit = C / c_norm
    V_unit = V / v_norm

    dC_unit = dA @ V_unit
    dV_unit = dA.T @ C_unit
    # Project out the radial component: d(x/|x|) = (I − x̂x̂ᵀ)/|x|
    dC = (dC_unit - np.sum(dC_unit * C_unit, axis=1, keepdims=True) * C_unit) / c_norm
    dV = (dV_unit - np.sum(dV_unit * V_unit, axis=1, keepdims=True) * V_unit) / v_norm
    return dC, dV


def label_matrix(positive_indices: Sequence[int], n: int) -> np.ndarray:
    """Binary (k, n) label matrix with one positive per row."""
    Y = np.zeros((len(positive_indices), n), dtype=bool)
    Y[np.arange(len(positive_indices)), np.asarray(positive_indices, dtype=np.int64)] = True
    return Y


def _logsumexp(X: np.ndarray) -> np.ndarray:
    peak = np.max(X, axis=1, keepdims=True)
    return (peak + np.log(np.sum(np.exp(X - peak), axis=1, keepdims=True)))[:, 0]


def align_loss(A: np.ndarray, Y: np.ndarray) -> tuple[float, np.ndarray]:
    """Contrastive alignment loss and its gradient w.r.t. the affinity matrix.

    Args:
        A: (k, n) affinity matrix.
        Y: (k, n) binary labels; every row needs at least one positive.

    Returns:
        tuple: (loss ≥ 0, dL/dA of shape (k, n)).

    Raises:
        DimensionError: If shapes differ.
        DataError: If a row of Y has no positive (the row is named).
    """
    A = np.asarray(A, dtype=np.float64)
    Y = np.asarray(Y).astype(bool)
    if A.shape != Y.shape or A.ndim != 2:
        raise DimensionError(f"affinity {A.shape} and labels {Y.shape} must match")
    empty = np.flatnonzero(~Y.any(axis=1))
    if empty.size:
        raise DataError(f"label row {int(empty[0])} has no positive")

    k = A.shape[0]
    masked = np.where(Y, A, -np.inf)
    lse_all = _logsumexp(A)
    lse_pos = _logsumexp(masked)
    loss = float(np.sum(lse_all - lse_pos) / k)

    softmax_all = np.exp(A - lse_all[:, None])
    softmax_pos = np.where(Y, np.exp(masked - lse_pos[:, None]), 0.0)
    return loss, (softmax_all - softmax_pos) / k


def contrastive_loss_and_grads(
    heads: ProjectionHeads,
    text_embeddings: np.ndarray,
    frame_embeddings: np.ndarray,
    labels: np.ndarray,
) -> tuple[float, dict[str, np.ndarray]]:
    """Full objective: heads → affinity → loss, with gradients for every block.

    Args:
        heads: Current projection heads.
        text_embeddings: (k, d_in) pre-projection commentary embeddings.
        frame_embeddings: (n, d_in) pre-projection frame embeddings.
        labels: (k, n) label matrix.

    Returns:
        tuple: (loss, gradients keyed like `heads.parameters()`).
    """
    C = head_forward(heads.text, text_embeddings)
    V = head_forward(heads.visual, frame_embeddings)
    loss, dA = align_loss(affinity(C, V), labels)
    dC, dV = affinity_backward(C, V, dA)

    text_grads = head_backward(heads.text, text_embeddings, dC)
    visual_grads = head_backward(heads.visual, frame_embeddings, dV)
    grads = {f"text.{k}": v for k, v in text_grads.blocks().items()}
    grads.update({f"visual.{k}": v for k, v in visual_grads.blocks().items()})
    return loss, grads
