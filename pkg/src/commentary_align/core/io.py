"""
Match file reading and writing.

A match file is a JSON document describing one half:

    {
      "match_id": "...", "half": 1, "duration_s": 2700.0,
      "commentaries": [{"text": "...", "t": 12.0, "t_gt": 9.0}, ...],
      "frames": {"feature_file": "x.frames.alnf", "fps": 1.0},
      "commentary_features": {"feature_file": "x.text.alnf"},
      "asr_file": "x.asr.json",
      "provenance": {...}
    }

Feature and transcript paths are resolved relative to the match file. The
per-commentary "display" string ("H - MM:SS") is written for readers and
ignored on load.
"""

import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, ValidationError

from commentary_align.core.errors import FeatureFileError, InvariantError, MatchFileError
from commentary_align.core.features import read_features, write_features
from commentary_align.core.logging import get_logger
from commentary_align.core.types import (
    CommentaryItem,
    FrameFeatureSequence,
    MatchRecord,
    display_time,
)

logger = get_logger(__name__)


class CommentaryEntry(CommentaryItem):
    display: str | None = None


class FramesEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    feature_file: str
    fps: float = 1.0


class CommentaryFeaturesEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    feature_file: str


class MatchFile(BaseModel):
    """On-disk schema of a match file."""

    match_id: str
    half: int
    duration_s: float
    commentaries: list[CommentaryEntry]
    frames: FramesEntry
    commentary_features: CommentaryFeaturesEntry | None = None
    asr_file: str | None = None
    provenance: dict[str, Any] | None = None


def _peek_match_id(raw: str) -> str | None:
    try:
        document = json.loads(raw)
    except json.JSONDecodeError:
        return None
    if isinstance(document, dict) and isinstance(document.get("match_id"), str):
        return document["match_id"]
    return None


def load_match(path: Path | str) -> MatchRecord:
    """Load and validate a match file together with its feature files.

    Args:
        path (Path | str): Match file to read.

    Returns:
        MatchRecord: The validated match half.

    Raises:
        MatchFileError: On parse failure, invariant violation or missing feature
            file; the error names the match id and the dotted field path.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise MatchFileError(f"file not found: {path}") from exc

    try:
        document = MatchFile.model_validate_json(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise MatchFileError(first["msg"], match_id=_peek_match_id(raw), field=field) from exc

    match_id = document.match_id
    base = path.parent

    try:
        frame_times, frame_features = read_features(base / document.frames.feature_file)
    except FeatureFileError as exc:
        raise MatchFileError(str(exc), match_id=match_id, field="frames.feature_file") from exc
    try:
        frames = FrameFeatureSequence(frame_times, frame_features, fps=document.frames.fps)
    except InvariantError as exc:
        raise MatchFileError(str(exc), match_id=match_id, field=f"frames.{exc.field}") from exc

    text_features = None
    if document.commentary_features is not None:
        try:
            _, text_features = read_features(base / document.commentary_features.feature_file)
        except FeatureFileError as exc:
            raise MatchFileError(
                str(exc), match_id=match_id, field="commentary_features.feature_file"
            ) from exc

    asr_path = None
    if document.asr_file is not None:
        asr_path = base / document.asr_file
        if not asr_path.is_file():
            raise MatchFileError(
                f"transcript not found: {asr_path}", match_id=match_id, field="asr_file"
            )

    commentaries = [
        CommentaryItem(**entry.model_dump(exclude={"display"})) for entry in document.commentaries
    ]
    try:
        record = MatchRecord(
            match_id=match_id,
            half=document.half,
            duration_s=document.duration_s,
            commentaries=commentaries,
            frames=frames,
            text_features=text_features,
            asr_path=asr_path,
            provenance=document.provenance,
        )
    except InvariantError as exc:
        raise MatchFileError(str(exc), match_id=match_id, field=exc.field) from exc

    logger.info(
        "Loaded match %s half %d: k=%d commentaries, n=%d frames",
        match_id,
        record.half,
        record.k,
        record.frames.n,
    )
    return record


def write_match(
    match: MatchRecord,
    path: Path | str,
    *,
    with_features: bool = True,
    frames_file: str | None = None,
    text_file: str | None = None,
) -> Path:
    """Write `match` as a match file.

    With `with_features`, the frame and commentary embeddings are written next
    to the match file as `<stem>.frames.alnf` / `<stem>.text.alnf`. Without
    it, `frames_file` / `text_file` must name existing files to reference.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    stem = path.name.removesuffix(".json")

    if with_features:
        frames_file = f"{stem}.frames.alnf"
        write_features(path.parent / frames_file, match.frames.timestamps, match.frames.features)
        if match.text_features is not None:
            text_file = f"{stem}.text.alnf"
            write_features(path.parent / text_file, match.source_times(), match.text_features)
    if frames_file is None:
        raise ValueError("frames_file is required when features are not written")

    asr_file = None
    if match.asr_path is not None:
        asr_file = _relative_to(Path(match.asr_path), path.parent)

    document = MatchFile(
        match_id=match.match_id,
        half=match.half,
        duration_s=match.duration_s,
        commentaries=[
            CommentaryEntry(**item.model_dump(), display=display_time(match.half, item.t))
            for item in match.commentaries
        ],
        frames=FramesEntry(feature_file=frames_file, fps=match.frames.fps),
        commentary_features=(
            CommentaryFeaturesEntry(feature_file=text_file) if text_file is not None else None
        ),
        asr_file=asr_file,
        provenance=match.provenance,
    )
    path.write_text(document.model_dump_json(indent=2, exclude_none=True) + "\n", encoding="utf-8")
    logger.debug("Wrote match file %s", path)
    return path


def _relative_to(target: Path, base: Path) -> str:
    try:
        return target.resolve().relative_to(base.resolve()).as_posix()
    except ValueError:
        return str(target.resolve())
