"""
ASR transcripts and their 10-second event bins.

Transcript file format (JSON): {"segments": [{"start": s, "end": s, "text": "..."}]}.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError, model_validator

from commentary_align.core.errors import DataError
from commentary_align.core.logging import get_logger

logger = get_logger(__name__)

DEFAULT_BIN_S = 10.0


class AsrSegment(BaseModel):
    """A transcribed span of narration; text may be empty (silence)."""

    start: float = Field(ge=0.0)
    end: float = Field(ge=0.0)
    text: str = ""

    @model_validator(mode="after")
    def _ordered(self) -> "AsrSegment":
        if self.end < self.start:
            raise ValueError(f"segment ends ({self.end}) before it starts ({self.start})")
        return self


class AsrFile(BaseModel):
    segments: list[AsrSegment] = Field(default_factory=list)


@dataclass(frozen=True)
class EventBin:
    """One [start_s, end_s) slot of the half and its text (raw or summarised)."""

    start_s: float
    end_s: float
    summary: str = ""

    @property
    def midpoint(self) -> float:
        return (self.start_s + self.end_s) / 2.0

    def contains(self, t: float) -> bool:
        return self.start_s <= t < self.end_s

    def label(self, origin: float = 0.0) -> str:
        return f"{self.start_s - origin:g}-{self.end_s - origin:g}s"


def load_asr(path: Path | str) -> list[AsrSegment]:
    """Read a transcript file, sorted by segment start.

    Raises:
        DataError: If the file is missing or does not validate.
    """
    path = Path(path)
    try:
        document = AsrFile.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise DataError(f"transcript not found: {path}") from exc
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise DataError(f"{path}: {field}: {first['msg']}") from exc
    logger.debug("Loaded %d transcript segments from %s", len(document.segments), path)
    return sorted(document.segments, key=lambda segment: segment.start)


def write_asr(segments: Sequence[AsrSegment], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        AsrFile(segments=list(segments)).model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    return path


def bin_transcript(
    segments: Sequence[AsrSegment],
    bin_s: float = DEFAULT_BIN_S,
    duration_s: float | None = None,
) -> list[EventBin]:
    """Tile the half into `bin_s` bins and gather the transcript text of each.

    A segment [start, end) contributes its text to every bin it overlaps; a
    zero-length segment goes to the bin holding its start. Bin text joins the
    contributions in time order with single spaces.

    Args:
        segments: Transcript segments.
        bin_s: Bin width (s).
        duration_s: Half length; bins cover at least [0, duration_s).

    Raises:
        DataError: On negative times or a non-positive bin width.
    """
    if bin_s <= 0:
        raise DataError(f"bin width must be positive, got {bin_s}")
    for i, segment in enumerate(segments):
        if segment.start < 0 or segment.end < 0:
            raise DataError(f"segment {i} has negative time [{segment.start}, {segment.end})")

    horizon = max([duration_s or 0.0, *(s.end for s in segments), *(s.start for s in segments)])
    count = max(1, math.ceil(horizon / bin_s))
    if segments and max(s.start for s in segments) >= count * bin_s:
        count += 1
    texts: list[list[str]] = [[] for _ in range(count)]

    for segment in sorted(segments, key=lambda s: s.start):
        if not segment.text:
            continue
        first = int(segment.start // bin_s)
        if segment.end > segment.start:
            last = max(first, math.ceil(segment.end / bin_s) - 1)
        else:
            last = first
        for b in range(first, min(last, count - 1) + 1):
            texts[b].append(segment.text)

    return [
        EventBin(start_s=b * bin_s, end_s=(b + 1) * bin_s, summary=" ".join(parts))
        for b, parts in enumerate(texts)
    ]
