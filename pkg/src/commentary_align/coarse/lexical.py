"""
Deterministic lexical matching of commentaries against event bins.

Text is lowercased and split into alphanumeric tokens; masks such as
"[PLAYER]" and "[TEAM]" are kept as single tokens and a fixed stop-word list
is removed. Bins are scored by TF-IDF cosine similarity.
"""

import re
from collections.abc import Sequence

import numpy as np
from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.metrics.pairwise import cosine_similarity

DEFAULT_TAU = 0.1

STOP_WORDS: frozenset[str] = frozenset(
    """
    a an the and or but if then so of to in on at by for with from into onto
    up out over as is are was were be been being it its this that these those
    he she they his her their him them there here has have had
    """.split()
)

_TOKEN = re.compile(r"\[[a-z]+\]|[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercased content tokens of `text`, stop words removed."""
    return [token for token in _TOKEN.findall(text.lower()) if token not in STOP_WORDS]


def lexical_scores(query: str, documents: Sequence[str]) -> np.ndarray:
    """TF-IDF cosine similarity of `query` against each document.

    Returns zeros when neither side has a content token.
    """
    if not documents:
        return np.zeros(0)
    vectorizer = TfidfVectorizer(tokenizer=tokenize, lowercase=False, token_pattern=None)
    try:
        doc_matrix = vectorizer.fit_transform(documents)
    except ValueError:
        # Every document is empty after tokenization
        return np.zeros(len(documents))
    query_vector = vectorizer.transform([query])
    return cosine_similarity(query_vector, doc_matrix)[0]


def best_match(query: str, documents: Sequence[str], tau: float = DEFAULT_TAU) -> int | None:
    """Index of the most similar document, or None below the `tau` floor.

    Ties resolve to the earliest document.
    """
    scores = lexical_scores(query, documents)
    if scores.size == 0:
        return None
    best = int(np.argmax(scores))
    return best if scores[best] >= tau else None
