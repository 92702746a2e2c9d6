"""
Offset distribution of synthetic commentaries.

Source timestamps lag the visual event by Δ = t − t_gt drawn from a normal
distribution with the mean of real commentary feeds, truncated to their range. Its
spread σ_Δ is unknown: it is solved by Monte-Carlo so that the mean
absolute offset hits its target. The solve uses one fixed set of
uniform draws for every trial σ (common random numbers), which makes the
objective smooth in σ and lets `brentq` bracket the root.
"""

from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.stats import truncnorm

from commentary_align.core.errors import DataError
from commentary_align.core.logging import get_logger

logger = get_logger(__name__)

OFFSET_MEAN_S = 13.85
OFFSET_ABSMEAN_S = 16.63
OFFSET_RANGE_S = (-108.0, 152.0)
WINDOW_10_PCT = 26.29

CALIBRATION_SAMPLES = 100_000
SIGMA_BRACKET = (0.05, 200.0)


def _standardised_bounds(
    mean: float, sigma: float, bounds: tuple[float, float]
) -> tuple[float, float]:
    return (bounds[0] - mean) / sigma, (bounds[1] - mean) / sigma


def sample_offsets(
    n: int,
    mean: float,
    sigma: float,
    bounds: tuple[float, float] = OFFSET_RANGE_S,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Draw `n` offsets from the truncated normal; every draw lies within `bounds`."""
    if sigma <= 0:
        raise DataError(f"offset sigma must be positive, got {sigma}")
    a, b = _standardised_bounds(mean, sigma, bounds)
    draws = truncnorm.rvs(a, b, loc=mean, scale=sigma, size=n, random_state=rng)
    return np.clip(np.asarray(draws, dtype=np.float64), bounds[0], bounds[1])


@lru_cache(maxsize=16)
def calibrate_offset_sigma(
    mean: float = OFFSET_MEAN_S,
    target_absmean: float = OFFSET_ABSMEAN_S,
    bounds: tuple[float, float] = OFFSET_RANGE_S,
    samples: int = CALIBRATION_SAMPLES,
    seed: int = 0,
) -> float:
    """σ_Δ at which the truncated normal's mean |Δ| equals `target_absmean`.

    Raises:
        DataError: If no σ in the search bracket reaches the target.
    """
    lo, hi = bounds
    if not lo < mean < hi:
        raise DataError(f"offset mean {mean} must lie inside {bounds}")
    uniforms = np.random.default_rng(seed).random(samples)

    def gap(sigma: float) -> float:
        a, b = _standardised_bounds(mean, sigma, bounds)
        draws = truncnorm.ppf(uniforms, a, b, loc=mean, scale=sigma)
        return float(np.mean(np.abs(draws))) - target_absmean

    low, high = SIGMA_BRACKET
    if gap(low) > 0 or gap(high) < 0:
        raise DataError(
            f"abs-mean target {target_absmean} is unreachable for mean {mean} within {bounds}"
        )
    sigma = float(brentq(gap, low, high, xtol=1e-6))
    logger.info("Calibrated offset sigma %.4f s (mean %.2f, |Δ| target %.2f)", sigma, mean, target_absmean)
    return sigma


def construct_offsets(
    k: int = 10_000,
    abs_mean: float = OFFSET_ABSMEAN_S,
    window_pct: float = WINDOW_10_PCT,
    window_s: float = 10.0,
    bounds: tuple[float, float] = OFFSET_RANGE_S,
) -> np.ndarray:
    """Deterministic offsets with a prescribed mean |Δ| and window coverage.

    Exactly `window_pct` percent of the offsets satisfy |Δ| ≤ `window_s`
    (evenly spread over [−window_s, window_s]); the rest sit just outside the
    window on a linear ramp scaled so that the mean |Δ| is `abs_mean`. Every
    third outside offset is negative.

    Raises:
        DataError: If `window_pct` of `k` is not a whole count, or the targets
            cannot be met within `bounds`.
    """
    inside = k * window_pct / 100.0
    if abs(inside - round(inside)) > 1e-6:
        raise DataError(f"{window_pct}% of {k} offsets is not a whole number")
    inside = int(round(inside))
    outside = k - inside

    inner = np.linspace(-window_s, window_s, inside) if inside else np.zeros(0)
    if outside == 0:
        return inner
    ramp = np.arange(1, outside + 1, dtype=np.float64) / outside
    excess = k * abs_mean - float(np.sum(np.abs(inner))) - outside * window_s
    if excess <= 0:
        raise DataError(f"abs-mean {abs_mean} is too small for {window_pct}% inside ±{window_s} s")
    scale = excess / float(np.sum(ramp))

    outer = window_s + scale * ramp
    signs = np.where(np.arange(outside) % 3 == 2, -1.0, 1.0)
    if outer[-1] > bounds[1] or outer[signs < 0].max(initial=0.0) > -bounds[0]:
        raise DataError(f"constructed offsets exceed {bounds}")
    return np.concatenate([inner, signs * outer])
