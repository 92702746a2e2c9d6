"""
Temporal offset statistics and their text / CSV rendering.

The offset of a commentary is Δ = predicted − ground truth, in seconds, so a
positive mean says commentary timestamps lag the visual event. A commentary
falls within window_t when |Δ| ≤ t, i.e. t is the window radius around the
key frame.
"""

import csv
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from commentary_align.core.errors import DataError, DimensionError

DEFAULT_WINDOWS: tuple[float, ...] = (10.0, 30.0, 45.0, 60.0)
# Relative slack for values sitting on a histogram bin edge
BIN_EDGE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class OffsetStats:
    """Offset statistics of one set of predictions.

    Attributes:
        deltas: Per-commentary offsets Δ_i (s).
        avg_delta: Mean of Δ (s).
        avg_abs_delta: Mean of |Δ| (s).
        window_coverage: Window radius t (s) -> percentage of |Δ_i| ≤ t.
    """

    deltas: np.ndarray
    avg_delta: float
    avg_abs_delta: float
    window_coverage: dict[float, float]

    @property
    def k(self) -> int:
        return int(self.deltas.shape[0])


@dataclass(frozen=True)
class Report:
    table: str
    histogram: list[tuple[float, int]]


def compute_offset_stats(
    pred: Sequence[float] | np.ndarray,
    gt: Sequence[float] | np.ndarray,
    windows: Sequence[float] = DEFAULT_WINDOWS,
) -> OffsetStats:
    """Compute Δ, avg(Δ), avg(|Δ|) and window coverages.

    Args:
        pred: Predicted timestamps (s).
        gt: Ground-truth timestamps (s), same length as `pred`.
        windows: Window radii (s), sorted ascending.

    Raises:
        DimensionError: If `pred` and `gt` differ in length.
        DataError: If the input is empty or `windows` is not sorted.
    """
    pred = np.asarray(pred, dtype=np.float64).ravel()
    gt = np.asarray(gt, dtype=np.float64).ravel()
    if pred.shape != gt.shape:
        raise DimensionError(f"pred has {pred.size} entries but gt has {gt.size}")
    if pred.size == 0:
        raise DataError("offset statistics need at least one commentary")
    windows = [float(w) for w in windows]
    if any(b < a for a, b in zip(windows, windows[1:])):
        raise DataError(f"windows must be sorted ascending, got {windows}")

    deltas = pred - gt
    abs_deltas = np.abs(deltas)
    k = deltas.size
    coverage = {w: 100.0 * int(np.count_nonzero(abs_deltas <= w)) / k for w in windows}
    return OffsetStats(
        deltas=deltas,
        avg_delta=float(np.mean(deltas)),
        avg_abs_delta=float(np.mean(abs_deltas)),
        window_coverage=coverage,
    )


def _bin_index(values: np.ndarray, bin_s: float) -> np.ndarray:
    """Bin of each value; quotients within rounding of an integer snap to it (0.3 / 0.1 -> 3)."""
    quotient = np.asarray(values, dtype=np.float64) / bin_s
    nearest = np.round(quotient)
    on_edge = np.isclose(quotient, nearest, rtol=BIN_EDGE_RTOL, atol=BIN_EDGE_RTOL)
    return np.where(on_edge, nearest, np.floor(quotient)).astype(np.int64)


def histogram(deltas: np.ndarray, bin_s: float) -> list[tuple[float, int]]:
    """Count offsets per `bin_s`-wide half-open bin [start, start + bin_s).

    Bins are aligned to multiples of `bin_s` and cover every offset, empty bins
    in between included. When all offsets are equal the single bin is centred
    on that value.
    """
    if bin_s <= 0:
        raise DataError(f"histogram bin width must be positive, got {bin_s}")
    deltas = np.asarray(deltas, dtype=np.float64)
    if deltas.size == 0:
        return []
    low, high = float(deltas.min()), float(deltas.max())
    if low == high:
        return [(low - bin_s / 2.0, int(deltas.size))]

    indices = _bin_index(deltas, bin_s)
    first, last = int(indices.min()), int(indices.max())
    counts = np.bincount(indices - first, minlength=last - first + 1)
    return [((first + i) * bin_s, int(count)) for i, count in enumerate(counts)]


def _window_label(window: float) -> str:
    return f"window_{window:g} (%)"


def render_comparison(columns: Mapping[str, OffsetStats]) -> str:
    """Render several statistics side by side, one column per configuration.

    Row order: avg(Δ), avg(|Δ|), then each window radius ascending.
    """
    names = list(columns)
    windows = sorted({w for stats in columns.values() for w in stats.window_coverage})
    rows: list[tuple[str, list[str]]] = [
        ("avg(Δ) (s)", [f"{columns[n].avg_delta:.2f}" for n in names]),
        ("avg(|Δ|) (s)", [f"{columns[n].avg_abs_delta:.2f}" for n in names]),
    ]
    for window in windows:
        rows.append(
            (
                _window_label(window),
                [
                    f"{columns[n].window_coverage[window]:.2f}"
                    if window in columns[n].window_coverage
                    else "-"
                    for n in names
                ],
            )
        )

    label_width = max(len(label) for label, _ in rows)
    widths = [max(len(name), *(len(values[i]) for _, values in rows)) for i, name in enumerate(names)]
    header = " " * label_width + "".join(f"  {name:>{w}}" for name, w in zip(names, widths))
    lines = [header, "-" * len(header)]
    for label, values in rows:
        lines.append(f"{label:<{label_width}}" + "".join(f"  {v:>{w}}" for v, w in zip(values, widths)))
    return "\n".join(lines) + "\n"


def render_report(stats: OffsetStats, histogram_bin_s: float = 10.0) -> Report:
    """Render one set of statistics as a text table plus histogram counts."""
    return Report(
        table=render_comparison({f"k={stats.k}": stats}),
        histogram=histogram(stats.deltas, histogram_bin_s),
    )


def write_histogram_csv(bins: Sequence[tuple[float, int]], path: Path | str) -> Path:
    """Write histogram counts as CSV with a `bin_start,count` header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["bin_start", "count"])
        for start, count in bins:
            writer.writerow([f"{start:g}", count])
    return path
