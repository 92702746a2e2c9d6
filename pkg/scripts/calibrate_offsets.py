"""
calibrate_offsets.py

Monte-Carlo calibration of the synthetic commentary offset distribution.

Usage:
    python scripts/calibrate_offsets.py [samples] [seed]

- samples (optional): number of draws used in the check, default 10000.
- seed (optional): seed of the check draws, default 0.

The script solves the spread of the truncated-normal offset distribution so
that its mean absolute offset matches the 16.63 s target, then draws
`samples` offsets with that spread and prints their summary statistics next
to the targets. It also prints the statistics of the deterministic
offset array that reproduces the target mean |Δ| and window_10 exactly.
"""

import sys

import numpy as np

from commentary_align.core.metrics import compute_offset_stats
from commentary_align.synth.calibration import (
    OFFSET_ABSMEAN_S,
    OFFSET_MEAN_S,
    OFFSET_RANGE_S,
    WINDOW_10_PCT,
    calibrate_offset_sigma,
    construct_offsets,
    sample_offsets,
)

# Read the optional arguments
samples = int(sys.argv[1]) if len(sys.argv) > 1 else 10_000
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

# Solve the spread
sigma = calibrate_offset_sigma(OFFSET_MEAN_S, OFFSET_ABSMEAN_S, OFFSET_RANGE_S)

# Check it on fresh draws
offsets = sample_offsets(samples, OFFSET_MEAN_S, sigma, OFFSET_RANGE_S, np.random.default_rng(seed))
sampled = compute_offset_stats(offsets, np.zeros_like(offsets))

# The exact construction
constructed = compute_offset_stats(construct_offsets(), np.zeros(10_000))

print(f"sigma            : {sigma:.4f} s")
print(f"                   {'target':>10} {'sampled':>10} {'constructed':>12}")
print(f"avg(Δ) (s)       : {OFFSET_MEAN_S:>10.2f} {sampled.avg_delta:>10.2f} {constructed.avg_delta:>12.2f}")
print(
    f"avg(|Δ|) (s)     : {OFFSET_ABSMEAN_S:>10.2f} {sampled.avg_abs_delta:>10.2f} "
    f"{constructed.avg_abs_delta:>12.2f}"
)
print(
    f"window_10 (%)    : {WINDOW_10_PCT:>10.2f} {sampled.window_coverage[10.0]:>10.2f} "
    f"{constructed.window_coverage[10.0]:>12.2f}"
)
print(f"range (s)        : [{offsets.min():.1f}, {offsets.max():.1f}] within {OFFSET_RANGE_S}")
