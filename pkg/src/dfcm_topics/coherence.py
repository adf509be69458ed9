"""Topic-coherence scoring: mean pairwise cosine over word embeddings."""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    MalformedLineError,
    DimensionMismatchError,
    TooFewKnownWordsError,
    ZeroVectorError,
)

log = logging.getLogger(__name__)


@dataclass
class WordVectorStore:
    dim: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, term):
        return term in self.vectors

    def __len__(self):
        return len(self.vectors)


@dataclass
class CoherenceReport:
    per_topic: list[tuple[int, float, int]]  # (topic index, score, words found)
    mean_score: float
    skipped_topics: list[int] = field(default_factory=list)


def load_word_vectors(path, expected_dim: int | None = None) -> WordVectorStore:
    """Parse a text embedding file: optional `count dim` header, then
    one `term v1 ... v_dim` line per term. Duplicate terms keep the
    first occurrence.
    """
    vectors: dict[str, np.ndarray] = {}
    dim = expected_dim
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    start = 0
    head = lines[0].split() if lines else []
    if len(head) == 2 and all(p.isdigit() for p in head):
        start = 1
        if dim is None:
            dim = int(head[1])
        elif int(head[1]) != dim:
            raise DimensionMismatchError(
                f"header declares dim {head[1]}, expected {dim}"
            )
    for lineno0, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        fields = line.split()
        term, values = fields[0], fields[1:]
        if dim is None:
            dim = len(values)
        if len(values) != dim:
            raise MalformedLineError(
                f"line {lineno0}: expected {dim} values, got {len(values)}",
                lineno0,
            )
        if term in vectors:
            log.warning("duplicate term %r at line %d ignored", term, lineno0)
            continue
        try:
            vectors[term] = np.array([float(v) for v in values])
        except ValueError as exc:
            raise MalformedLineError(
                f"line {lineno0}: non-numeric value ({exc})", lineno0
            ) from exc
    if dim is None or not vectors:
        raise MalformedLineError("embedding file is empty")
    return WordVectorStore(dim, vectors)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


def tc_w2v(topic_words: list[str], store: WordVectorStore) -> tuple[float, int]:
    """Mean pairwise cosine over the topic words found in the store.

    Returns (score, number of words found). Words missing from the store
    are skipped; fewer than two known words is an error.
    """
    if not topic_words:
        raise TooFewKnownWordsError("topic has no words")
    known = [store.vectors[w] for w in topic_words if w in store]
    n = len(known)
    if n < 2:
        raise TooFewKnownWordsError(
            f"only {n} of {len(topic_words)} words found in the embedding store"
        )
    total = 0.0
    for j in range(1, n):
        for i in range(j):
            total += cosine(known[i], known[j])
    return total / (n * (n - 1) / 2), n


def evaluate(topic_set, store: WordVectorStore) -> CoherenceReport:
    """Score every topic's ranked word list; skip unscoreable topics."""
    per_topic = []
    skipped = []
    for idx, topic in enumerate(topic_set.topics):
        words = [term for term, _ in topic.words]
        try:
            score, found = tc_w2v(words, store)
        except TooFewKnownWordsError:
            skipped.append(idx)
            continue
        per_topic.append((idx, score, found))
    mean = float(np.mean([s for _, s, _ in per_topic])) if per_topic else float("nan")
    return CoherenceReport(per_topic, mean, skipped)


def save_report(report: CoherenceReport, path) -> None:
    payload = {
        "per_topic": [
            {"topic": i, "score": s, "words_found": n} for i, s, n in report.per_topic
        ],
        "mean_score": report.mean_score,
        "skipped_topics": report.skipped_topics,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
