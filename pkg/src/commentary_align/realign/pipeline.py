"""
Coarse-to-fine alignment of whole matches, aligned-file output and the
four-configuration stage ablation.
"""

from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np

from commentary_align.coarse.llm import LlmClient
from commentary_align.coarse.prealign import CoarseConfig, coarse_align
from commentary_align.core.io import write_match
from commentary_align.core.logging import get_logger
from commentary_align.core.metrics import DEFAULT_WINDOWS, OffsetStats, compute_offset_stats
from commentary_align.core.types import MatchRecord
from commentary_align.numerics.heads import ProjectionHeads
from commentary_align.realign.realigner import (
    AlignmentReport,
    ChosenFrame,
    RealignConfig,
    realign_match,
    with_stats,
)

logger = get_logger(__name__)

ABLATION_COLUMNS = ("none", "coarse", "fine", "coarse+fine")


def coarse_times(
    match: MatchRecord, coarse_cfg: CoarseConfig | None, client: LlmClient | None = None
) -> np.ndarray | None:
    """Stage-one timestamps clipped to the half, or None when the stage does not apply."""
    if coarse_cfg is None or coarse_cfg.mode == "off":
        return None
    if match.asr_path is None:
        logger.info("Match %s has no transcript; skipping the coarse stage", match.match_id)
        return None
    times = coarse_align(match, coarse_cfg, client).times
    return np.clip(times, 0.0, match.duration_s)


def pipeline_align(
    match: MatchRecord,
    heads: ProjectionHeads,
    coarse_cfg: CoarseConfig | None = None,
    cfg: RealignConfig | None = None,
    client: LlmClient | None = None,
    windows: Sequence[float] = DEFAULT_WINDOWS,
) -> AlignmentReport:
    """Coarse stage (when a transcript exists) followed by fine realignment.

    Fine windows are centred on the coarse timestamps when the coarse stage
    ran and on the source timestamps otherwise.
    """
    cfg = cfg or RealignConfig()
    coarse = coarse_times(match, coarse_cfg, client)
    fine = realign_match(match, heads, cfg, centers=coarse)

    rows = fine.rows
    if coarse is not None:
        rows = [
            ChosenFrame(
                commentary_index=row.commentary_index,
                source_t=row.source_t,
                coarse_t=float(coarse[row.commentary_index]),
                aligned_t=row.aligned_t,
                frame_index=row.frame_index,
                score=row.score,
            )
            for row in fine.rows
        ]
    report = AlignmentReport(
        match_id=match.match_id,
        rows=rows,
        coarse_mode=coarse_cfg.mode if coarse is not None else "off",
        fine=True,
        config=cfg,
    )
    report = with_stats(report, match, windows)
    if report.stats is not None and report.stats.window_coverage:
        window, coverage = next(iter(report.stats.window_coverage.items()))
        logger.info(
            "Match %s aligned: avg(|Δ|) %.2f s, window_%g %.2f%%",
            match.match_id,
            report.stats.avg_abs_delta,
            window,
            coverage,
        )
    return report


def apply_report(match: MatchRecord, report: AlignmentReport) -> MatchRecord:
    """Copy of `match` with `t_aligned` (and `t_coarse` when present) filled in."""
    commentaries = []
    for item, row in zip(match.commentaries, report.rows, strict=True):
        update: dict[str, Any] = {"t_aligned": row.aligned_t}
        if row.coarse_t is not None:
            update["t_coarse"] = row.coarse_t
        commentaries.append(item.model_copy(update=update))
    return match.with_commentaries(commentaries)


def provenance_block(
    report: AlignmentReport,
    checkpoint: str | None = None,
    coarse_cfg: CoarseConfig | None = None,
) -> dict[str, Any]:
    return {
        "checkpoint_id": checkpoint,
        "realign": report.config.model_dump(),
        "coarse": coarse_cfg.model_dump(exclude={"endpoint"}) if coarse_cfg else None,
        "stages": {"coarse": report.coarse_mode, "fine": report.fine},
    }


def write_aligned_match(
    match: MatchRecord,
    report: AlignmentReport,
    path: Path | str,
    checkpoint: str | None = None,
    coarse_cfg: CoarseConfig | None = None,
) -> Path:
    """Write the realigned match file with its provenance block.

    Args:
        match: The source match.
        report: Result of `realign_match` or `pipeline_align` on it.
        path: Output match file; feature files are written next to it.
        checkpoint: Identifier of the heads used (see `checkpoint_id`).
        coarse_cfg: Coarse-stage settings, recorded without the endpoint.
    """
    aligned = apply_report(match, report)
    provenance = dict(match.provenance or {})
    provenance["alignment"] = provenance_block(report, checkpoint, coarse_cfg)
    aligned = replace(aligned, provenance=provenance)
    path = write_match(aligned, path)
    logger.info("Wrote aligned match %s to %s", match.match_id, path)
    return path


def run_ablation(
    matches: Sequence[MatchRecord],
    heads: ProjectionHeads,
    coarse_cfg: CoarseConfig | None = None,
    cfg: RealignConfig | None = None,
    windows: Sequence[float] = DEFAULT_WINDOWS,
    client: LlmClient | None = None,
) -> dict[str, OffsetStats]:
    """Offset statistics of the four stage combinations over a set of matches.

    Columns: "none" (source timestamps), "coarse" (stage one only), "fine"
    (realignment around the source timestamps) and "coarse+fine". Matches
    without a transcript contribute their source timestamps to the coarse
    column.

    Raises:
        MissingGroundTruthError: If a match lacks ground truth.
    """
    coarse_cfg = coarse_cfg or CoarseConfig()
    cfg = cfg or RealignConfig()
    predictions: dict[str, list[np.ndarray]] = {name: [] for name in ABLATION_COLUMNS}
    truths: list[np.ndarray] = []

    for match in matches:
        truths.append(match.ground_truth_times())
        source = match.source_times()
        coarse = coarse_times(match, coarse_cfg, client)
        predictions["none"].append(source)
        predictions["coarse"].append(source if coarse is None else coarse)
        predictions["fine"].append(realign_match(match, heads, cfg).aligned_times())
        predictions["coarse+fine"].append(
            realign_match(match, heads, cfg, centers=coarse).aligned_times()
        )

    gt = np.concatenate(truths)
    return {
        name: compute_offset_stats(np.concatenate(predictions[name]), gt, windows)
        for name in ABLATION_COLUMNS
    }
