import logging
from collections.abc import Callable, Sequence

import numpy as np
import pytest

from commentary_align.core.logging import PACKAGE_NAME
from commentary_align.core.types import CommentaryItem, FrameFeatureSequence, MatchRecord


class _ListHandler(logging.Handler):
    def __init__(self) -> None:
        super().__init__(logging.DEBUG)
        self.records: list[logging.LogRecord] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.records.append(record)


@pytest.fixture
def log_records():
    """Records emitted by any package logger during the test."""
    logger = logging.getLogger(PACKAGE_NAME)
    handler = _ListHandler()
    saved_level = logger.level
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG)
    yield handler.records
    logger.removeHandler(handler)
    logger.setLevel(saved_level)


MatchFactory = Callable[..., MatchRecord]


@pytest.fixture
def make_match() -> MatchFactory:
    """Build small in-memory matches with Gaussian random embeddings.

    Frames sit at 0, 1, ..., n−1 seconds. Keyword arguments: `t` (source
    times), `t_gt`, `n`, `d`, `seed`, `duration_s`, `texts`.
    """

    def factory(
        t: Sequence[float] = (10.0, 20.0),
        t_gt: Sequence[float] | None = None,
        n: int = 60,
        d: int = 8,
        seed: int = 0,
        duration_s: float | None = None,
        texts: Sequence[str] | None = None,
        match_id: str = "tiny",
    ) -> MatchRecord:
        rng = np.random.default_rng(seed)
        k = len(t)
        texts = texts or [f"commentary {i}" for i in range(k)]
        gts = t_gt if t_gt is not None else [None] * k
        frames = rng.standard_normal((n, d))
        text = rng.standard_normal((k, d))
        return MatchRecord(
            match_id=match_id,
            half=1,
            duration_s=float(duration_s if duration_s is not None else n),
            commentaries=[
                CommentaryItem(text=texts[i], t=float(t[i]), t_gt=gts[i]) for i in range(k)
            ],
            frames=FrameFeatureSequence(np.arange(n, dtype=np.float64), frames, fps=1.0),
            text_features=text,
        )

    return factory
