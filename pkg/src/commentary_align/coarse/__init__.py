from commentary_align.coarse.lexical import DEFAULT_TAU, STOP_WORDS, best_match, lexical_scores, tokenize
from commentary_align.coarse.llm import LlmClient, LlmEndpointConfig, load_template, render_template
from commentary_align.coarse.prealign import (
    CoarseConfig,
    CoarseResult,
    coarse_align,
    parse_summaries,
    parse_timestamp,
    predict_timestamp,
    render_predict_prompt,
    render_summarize_prompt,
    summarize_bins,
)
from commentary_align.coarse.transcript import (
    DEFAULT_BIN_S,
    AsrSegment,
    EventBin,
    bin_transcript,
    load_asr,
    write_asr,
)

__all__ = [
    "DEFAULT_BIN_S",
    "DEFAULT_TAU",
    "STOP_WORDS",
    "AsrSegment",
    "CoarseConfig",
    "CoarseResult",
    "EventBin",
    "LlmClient",
    "LlmEndpointConfig",
    "best_match",
    "bin_transcript",
    "coarse_align",
    "lexical_scores",
    "load_asr",
    "load_template",
    "parse_summaries",
    "parse_timestamp",
    "predict_timestamp",
    "render_predict_prompt",
    "render_summarize_prompt",
    "render_template",
    "summarize_bins",
    "tokenize",
    "write_asr",
]
