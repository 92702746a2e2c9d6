from commentary_align.core.logging import configure_logging, get_current_config, get_logger
from commentary_align.core.io import load_match, write_match
from commentary_align.core.metrics import (
    DEFAULT_WINDOWS,
    OffsetStats,
    compute_offset_stats,
    render_comparison,
    render_report,
)
from commentary_align.core.types import (
    CommentaryItem,
    FrameFeatureSequence,
    MatchRecord,
    display_time,
)

__all__ = [
    "DEFAULT_WINDOWS",
    "CommentaryItem",
    "FrameFeatureSequence",
    "MatchRecord",
    "OffsetStats",
    "compute_offset_stats",
    "configure_logging",
    "display_time",
    "get_current_config",
    "get_logger",
    "load_match",
    "render_comparison",
    "render_report",
    "write_match",
]
