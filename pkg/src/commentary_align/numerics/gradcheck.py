"""
Finite-difference gradient checking.

`loss_fn(params)` must return `(loss, grads)` where `grads` has the same
blocks as `params`. Every coordinate is perturbed by ±h and ±2h and the
fourth-order central difference

    (8·(L(+h) − L(−h)) − (L(+2h) − L(−2h))) / 12h

is compared with the analytic gradient in float64. Its truncation error is
O(h⁴), so near-zero gradient components still compare meaningfully.
"""

from collections.abc import Callable

import numpy as np

from commentary_align.core.errors import GradientCheckError, NumericError
from commentary_align.core.logging import get_logger

logger = get_logger(__name__)

LossFn = Callable[[dict[str, np.ndarray]], tuple[float, dict[str, np.ndarray]]]

DEFAULT_STEP = 1e-4
ABSOLUTE_FLOOR = 1e-7


def relative_error(analytic: float, numeric: float, floor: float = ABSOLUTE_FLOOR) -> float:
    """|a − n| / max(|a|, |n|), or the plain difference when both are below `floor`."""
    scale = max(abs(analytic), abs(numeric))
    diff = abs(analytic - numeric)
    return diff if scale < floor else diff / scale


def _finite_loss(loss_fn: LossFn, params: dict[str, np.ndarray]) -> float:
    loss = float(loss_fn(params)[0])
    if not np.isfinite(loss):
        raise NumericError(f"loss is not finite ({loss}) near the checked parameters")
    return loss


def grad_check(
    loss_fn: LossFn,
    params: dict[str, np.ndarray],
    h: float = DEFAULT_STEP,
    tolerance: float | None = None,
) -> float:
    """Largest coordinate-wise relative error between analytic and numeric gradients.

    Args:
        loss_fn: Deterministic loss returning `(loss, grads)`.
        params: Point to check at; arrays are copied to float64, never mutated.
        h: Central-difference step.
        tolerance: When given, exceeding it raises instead of returning.

    Raises:
        NumericError: If the loss is not finite at a sampled point.
        GradientCheckError: If `tolerance` is given and exceeded.
    """
    point = {name: np.array(value, dtype=np.float64) for name, value in params.items()}
    _finite_loss(loss_fn, point)
    _, analytic = loss_fn(point)

    worst = 0.0
    worst_at = ""
    for name, block in point.items():
        grad = np.asarray(analytic[name], dtype=np.float64)
        flat = block.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            losses = []
            for offset in (h, -h, 2.0 * h, -2.0 * h):
                flat[i] = original + offset
                losses.append(_finite_loss(loss_fn, point))
            flat[i] = original

            numeric = (8.0 * (losses[0] - losses[1]) - (losses[2] - losses[3])) / (12.0 * h)
            error = relative_error(float(grad.reshape(-1)[i]), numeric)
            if error > worst:
                worst, worst_at = error, f"{name}[{i}]"

    logger.debug("Gradient check: max relative error %.3e at %s", worst, worst_at or "-")
    if tolerance is not None and worst > tolerance:
        raise GradientCheckError(
            f"max relative error {worst:.3e} at {worst_at} exceeds tolerance {tolerance:.1e}"
        )
    return worst
