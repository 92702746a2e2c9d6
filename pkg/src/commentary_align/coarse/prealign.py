"""
Stage-one (coarse) alignment from narration transcripts.

Transcript text is gathered into 10-second event bins, optionally summarised
by the LLM endpoint, and each commentary is then moved to the bin it matches
best, either by asking the LLM or by lexical TF-IDF matching. Every failure
path falls back to something defined: a failed summary becomes the raw bin
text, a failed prediction becomes the lexical prediction, and no match at all
keeps the original timestamp.
"""

import re
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from commentary_align.coarse.lexical import DEFAULT_TAU, best_match, tokenize
from commentary_align.coarse.llm import LlmClient, LlmEndpointConfig, render_template
from commentary_align.coarse.transcript import DEFAULT_BIN_S, EventBin, bin_transcript, load_asr
from commentary_align.core.errors import DataError, EndpointError
from commentary_align.core.logging import get_logger
from commentary_align.core.types import CommentaryItem, MatchRecord

logger = get_logger(__name__)

# The summarisation prompt covers one minute of video, six 10-second bins
BINS_PER_PROMPT = 6
DEFAULT_CANDIDATE_SPAN_S = 90.0

CoarseMode = Literal["llm", "lexical", "off"]

_CLOCK = re.compile(r"(?<![\d.])(\d{1,3}):([0-5]\d)(?::([0-5]\d))?")
_NUMBER = re.compile(r"-?\d+(?:\.\d+)?")
_LINE_PREFIX = re.compile(
    r"^\s*(?:[-*•]\s*|\d+[.)]\s+)?(?:\d+(?:\.\d+)?\s*-\s*\d+(?:\.\d+)?\s*s?\s*[:.)-]\s*)?"
)


class CoarseConfig(BaseModel):
    """Settings of the coarse stage."""

    model_config = ConfigDict(extra="forbid")

    mode: CoarseMode = "lexical"
    bin_s: float = Field(default=DEFAULT_BIN_S, gt=0.0)
    tau: float = Field(default=DEFAULT_TAU, ge=0.0, le=1.0)
    candidate_span_s: float = Field(default=DEFAULT_CANDIDATE_SPAN_S, ge=0.0)
    endpoint: LlmEndpointConfig | None = None


@dataclass(frozen=True, eq=False)
class CoarseResult:
    times: np.ndarray
    bins: list[EventBin]
    summarized: bool


def _format_seconds(t: float) -> str:
    return f"{t:.1f}"


def render_summarize_prompt(clip_bins: Sequence[EventBin], template: str) -> str:
    """Summarisation prompt for up to six consecutive bins, in clip-relative time."""
    origin = clip_bins[0].start_s
    sentences = "\n".join(
        f"{b.label(origin)}: {b.summary}" for b in clip_bins if b.summary
    )
    return render_template(
        template,
        asr_sentences=sentences,
        num_bins=len(clip_bins),
        interval_list=", ".join(b.label(origin) for b in clip_bins),
    )


def render_predict_prompt(
    commentary: CommentaryItem, candidates: Sequence[EventBin], template: str
) -> str:
    """Timestamp-prediction prompt offering `candidates` in absolute seconds."""
    events = "\n".join(f"{b.label()}: {b.summary}" for b in candidates)
    return render_template(
        template,
        original_timestamp=_format_seconds(commentary.t),
        commentary=commentary.text,
        events=events,
    )


def parse_summaries(reply: str, expected: int) -> list[str]:
    """Split an LLM reply into at most `expected` one-line summaries."""
    summaries = []
    for line in reply.splitlines():
        text = _LINE_PREFIX.sub("", line, count=1).strip()
        if text:
            summaries.append(text)
    return summaries[:expected]


def parse_timestamp(reply: str) -> float | None:
    """First timestamp in an LLM reply, as seconds.

    Accepts "MM:SS" / "H:MM:SS" clock notation or a plain number of seconds,
    whichever appears first.
    """
    clock = _CLOCK.search(reply)
    number = _NUMBER.search(reply)
    if clock and (number is None or clock.start() <= number.start()):
        a, b, c = clock.groups()
        if c is None:
            return 60.0 * int(a) + int(b)
        return 3600.0 * int(a) + 60.0 * int(b) + int(c)
    if number:
        return float(number.group())
    return None


def summarize_bins(
    bins: Sequence[EventBin],
    mode: Literal["llm", "passthrough"] = "passthrough",
    client: LlmClient | None = None,
) -> list[EventBin]:
    """Turn raw bin text into event descriptions.

    Passthrough copies the raw text. LLM mode sends one prompt per minute of
    video, concurrently up to the endpoint's in-flight limit, and reassembles
    replies in bin order; bins the reply does not cover keep their raw text,
    and so do all bins of a clip whose request failed.

    Raises:
        EndpointError: LLM mode without a client, or every clip failed after retries.
    """
    if mode == "passthrough":
        return list(bins)
    if client is None:
        raise EndpointError("LLM summarisation requires an endpoint client")

    template = client.template("summarize")
    clips = [list(bins[i : i + BINS_PER_PROMPT]) for i in range(0, len(bins), BINS_PER_PROMPT)]
    replies: dict[int, str] = {}
    failures: dict[int, EndpointError] = {}
    with ThreadPoolExecutor(max_workers=client.config.max_in_flight) as pool:
        futures = {
            pool.submit(client.complete, render_summarize_prompt(clip, template)): clip_index
            for clip_index, clip in enumerate(clips)
        }
        for future in as_completed(futures):
            clip_index = futures[future]
            try:
                replies[clip_index] = future.result()
            except EndpointError as exc:
                failures[clip_index] = exc

    if clips and len(failures) == len(clips):
        raise EndpointError(f"all {len(clips)} summarisation requests failed: {failures[0]}")

    summarized: list[EventBin] = []
    for clip_index, clip in enumerate(clips):
        if clip_index in failures:
            logger.warning(
                "Summarisation of clip %d failed (%s); keeping raw text",
                clip_index,
                failures[clip_index],
            )
            summarized.extend(clip)
            continue
        summaries = parse_summaries(replies[clip_index], len(clip))
        if len(summaries) < len(clip):
            logger.warning(
                "LLM returned %d of %d summaries for clip %d; keeping raw text for the rest",
                len(summaries),
                len(clip),
                clip_index,
            )
        for i, event_bin in enumerate(clip):
            summary = summaries[i] if i < len(summaries) else event_bin.summary
            summarized.append(EventBin(event_bin.start_s, event_bin.end_s, summary))
    return summarized


def candidate_bins(bins: Sequence[EventBin], t: float, span_s: float) -> list[EventBin]:
    """Bins overlapping [t − span_s, t + span_s]."""
    return [b for b in bins if b.end_s > t - span_s and b.start_s <= t + span_s]


def _predict_lexical(commentary: CommentaryItem, candidates: Sequence[EventBin], tau: float) -> float:
    index = best_match(commentary.text, [b.summary for b in candidates], tau)
    return commentary.t if index is None else candidates[index].midpoint


def predict_timestamp(
    commentary: CommentaryItem,
    bins: Sequence[EventBin],
    mode: Literal["llm", "lexical"] = "lexical",
    client: LlmClient | None = None,
    tau: float = DEFAULT_TAU,
    candidate_span_s: float = DEFAULT_CANDIDATE_SPAN_S,
    fallback: bool = True,
) -> float:
    """Coarse timestamp of one commentary.

    Lexical mode returns the midpoint of the best TF-IDF bin when its
    similarity reaches `tau`. LLM mode returns the first timestamp of the
    reply when it falls inside an offered bin. Otherwise, and for commentaries
    without content words, the original `t` is returned.

    An endpoint failure in LLM mode falls back to lexical matching, unless
    `fallback` is False.

    Raises:
        DataError: If `bins` is empty.
        EndpointError: On endpoint failure with `fallback` False.
    """
    if not bins:
        raise DataError("coarse prediction needs at least one event bin")
    if not tokenize(commentary.text):
        logger.warning("Commentary at t=%.1f has no content words; keeping its timestamp", commentary.t)
        return commentary.t

    candidates = candidate_bins(bins, commentary.t, candidate_span_s)
    if not candidates:
        return commentary.t

    if mode == "llm":
        if client is None:
            logger.warning("No LLM client available; using lexical matching")
        else:
            try:
                reply = client.complete(
                    render_predict_prompt(commentary, candidates, client.template("predict"))
                )
            except EndpointError as exc:
                if not fallback:
                    raise
                logger.warning("LLM prediction failed (%s); using lexical matching", exc)
            else:
                predicted = parse_timestamp(reply)
                if predicted is not None and any(b.contains(predicted) for b in candidates):
                    return predicted
                logger.debug("LLM reply %r is not inside an offered bin", reply[:80])
                return commentary.t

    return _predict_lexical(commentary, candidates, tau)


def coarse_align(
    match: MatchRecord,
    config: CoarseConfig | None = None,
    client: LlmClient | None = None,
) -> CoarseResult:
    """Run the coarse stage on one match with a transcript.

    In LLM mode, a client is created from `config.endpoint` unless given.
    The first endpoint failure switches the rest of the match to lexical
    matching, so a dead endpoint costs one retry budget per match.

    Raises:
        DataError: If the match has no transcript.
        EndpointError: If LLM mode is requested without any endpoint.
    """
    config = config or CoarseConfig()
    if match.asr_path is None:
        raise DataError(f"match {match.match_id} has no transcript for the coarse stage")

    bins = bin_transcript(load_asr(match.asr_path), config.bin_s, match.duration_s)
    owned_client = None
    if config.mode == "llm" and client is None:
        endpoint = config.endpoint or LlmEndpointConfig.from_env()
        client = owned_client = LlmClient(endpoint)

    try:
        summarized = False
        mode = "lexical"
        if config.mode == "llm":
            try:
                bins = summarize_bins(bins, "llm", client)
                summarized = True
                mode = "llm"
            except EndpointError as exc:
                logger.warning(
                    "Summarisation failed (%s); raw transcript bins and lexical matching "
                    "for match %s",
                    exc,
                    match.match_id,
                )

        times = np.empty(match.k, dtype=np.float64)
        for index, item in enumerate(match.commentaries):
            if mode == "llm":
                try:
                    times[index] = predict_timestamp(
                        item, bins, "llm", client, config.tau, config.candidate_span_s, fallback=False
                    )
                    continue
                except EndpointError as exc:
                    logger.warning(
                        "LLM prediction failed (%s); lexical matching for the remaining %d "
                        "commentaries of match %s",
                        exc,
                        match.k - index,
                        match.match_id,
                    )
                    mode = "lexical"
            times[index] = predict_timestamp(
                item, bins, "lexical", None, config.tau, config.candidate_span_s
            )
    finally:
        if owned_client is not None:
            owned_client.close()

    moved = int(np.count_nonzero(times != match.source_times()))
    logger.info(
        "Coarse stage (%s) moved %d of %d commentaries in match %s",
        config.mode,
        moved,
        match.k,
        match.match_id,
    )
    return CoarseResult(times=times, bins=bins, summarized=summarized)
