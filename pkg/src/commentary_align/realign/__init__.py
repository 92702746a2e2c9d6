from commentary_align.realign.pipeline import (
    ABLATION_COLUMNS,
    apply_report,
    pipeline_align,
    run_ablation,
    write_aligned_match,
)
from commentary_align.realign.realigner import (
    AlignmentReport,
    ChosenFrame,
    RealignConfig,
    brute_force_align,
    realign_match,
)

__all__ = [
    "ABLATION_COLUMNS",
    "AlignmentReport",
    "ChosenFrame",
    "RealignConfig",
    "apply_report",
    "brute_force_align",
    "pipeline_align",
    "realign_match",
    "run_ablation",
    "write_aligned_match",
]
