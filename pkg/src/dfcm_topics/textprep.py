"""Text cleaning, vocabulary construction and TF-IDF vectorization.

Turns raw documents into the sparse nonnegative document-term matrix
consumed by both topic-detection pipelines.
"""

import json
import re
import string
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError, EmptyVocabularyError, MalformedLineError

# Any unicode letter repeated 3+ times; digits and punctuation are left alone.
_REPEAT_RE = re.compile(r"([^\W\d_])\1{2,}", re.UNICODE)
_URL_PREFIXES = ("www.", "http://", "https://")
_STRIP_CHARS = string.punctuation + "‘’“”…"


def clean_text(raw: str) -> str:
    """Lowercase and strip web noise from a raw document.

    Removes URL-like and @user tokens, strips leading '#' from hashtags,
    and collapses runs of 3+ identical letters down to 2. The result is
    a single-space-joined token string; cleaning is idempotent.
    """
    out = []
    for token in raw.lower().split():
        token = token.lstrip("#")
        if token.startswith(_URL_PREFIXES) or token.startswith("@"):
            continue
        token = _REPEAT_RE.sub(r"\1\1", token)
        # Collapsing can expose a URL prefix (e.g. "htttp://"); recheck so
        # cleaning is a fixed point.
        if token.startswith(_URL_PREFIXES) or token.startswith("@"):
            continue
        if token:
            out.append(token)
    return " ".join(out)


def tokenize(text: str) -> list[str]:
    """Split cleaned text on whitespace and strip surrounding punctuation.

    Interior apostrophes and hyphens are kept ("don't", "e-mail").
    """
    tokens = []
    for tok in text.split():
        tok = tok.strip(_STRIP_CHARS)
        if tok:
            tokens.append(tok)
    return tokens


@dataclass
class Vocabulary:
    """Pruned, lexicographically ordered term set of a corpus."""

    terms: list[str]
    doc_freq: dict[str, int]
    threshold: int
    index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.index = {term: i for i, term in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)


def frequency_threshold(n_docs: int) -> int:
    """Minimum document frequency for a term to survive pruning."""
    return max(10, n_docs // 1000)


def build_vocabulary(corpus: list[list[str]], stopwords: set[str]) -> Vocabulary:
    """Build the pruned vocabulary of a tokenized corpus.

    Stopwords are removed first; the document-frequency threshold
    max(10, m // 1000) then applies to content terms only.
    """
    if not corpus:
        raise EmptyVocabularyError("corpus is empty")
    threshold = frequency_threshold(len(corpus))
    doc_freq: dict[str, int] = {}
    for tokens in corpus:
        for term in set(tokens):
            if term not in stopwords:
                doc_freq[term] = doc_freq.get(term, 0) + 1
    kept = sorted(t for t, df in doc_freq.items() if df >= threshold)
    if not kept:
        raise EmptyVocabularyError(
            f"no term occurs in at least {threshold} documents"
        )
    return Vocabulary(kept, {t: doc_freq[t] for t in kept}, threshold)


@dataclass
class DocTermMatrix:
    """Sparse nonnegative TF-IDF matrix, documents x vocabulary terms."""

    matrix: sp.csr_matrix

    @property
    def n_docs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_terms(self) -> int:
        return self.matrix.shape[1]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz


def vectorize_tfidf(corpus: list[list[str]], vocab: Vocabulary) -> DocTermMatrix:
    """TF-IDF weight the corpus against a fixed vocabulary.

    tf is the raw in-document count, idf the smoothed ln((1+N)/(1+df)) + 1.
    Out-of-vocabulary tokens are ignored.
    """
    n_docs = len(corpus)
    n_terms = len(vocab)
    idf = np.empty(n_terms)
    for term, j in vocab.index.items():
        idf[j] = np.log((1.0 + n_docs) / (1.0 + vocab.doc_freq[term])) + 1.0

    rows, cols, vals = [], [], []
    for d, tokens in enumerate(corpus):
        counts: dict[int, int] = {}
        for tok in tokens:
            j = vocab.index.get(tok)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        for j, tf in counts.items():
            rows.append(d)
            cols.append(j)
            vals.append(tf * idf[j])
    mat = sp.csr_matrix(
        (vals, (rows, cols)), shape=(n_docs, n_terms), dtype=np.float64
    )
    mat.eliminate_zeros()
    return DocTermMatrix(mat)


def load_stopwords(path) -> set[str]:
    """Read a one-term-per-line stopword file.

    The shipped defaults are addressable by language code: "en" or "id".
    """
    if path in ("en", "id"):
        return default_stopwords(path)
    with open(path, encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip()}


def default_stopwords(lang: str) -> set[str]:
    """Packaged default stopword list ("en" or "id")."""
    data = resources.files("dfcm_topics.data").joinpath(f"stopwords_{lang}.txt")
    return {line.strip() for line in data.read_text("utf-8").splitlines() if line.strip()}


def read_corpus_jsonl(path) -> list[dict]:
    """Read a JSON-lines corpus of {"id": ..., "text": ...} objects."""
    docs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(
                    f"line {lineno}: invalid JSON ({exc})", lineno
                ) from exc
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise MalformedLineError(
                    f"line {lineno}: expected object with 'id' and 'text'", lineno
                )
            if not obj["id"] or obj["id"] in seen:
                raise MalformedLineError(
                    f"line {lineno}: duplicate or empty document id {obj['id']!r}",
                    lineno,
                )
            seen.add(obj["id"])
            docs.append({"id": str(obj["id"]), "text": str(obj["text"])})
    return docs


def save_vocabulary(vocab: Vocabulary, path) -> None:
    payload = {
        "terms": vocab.terms,
        "doc_freq": vocab.doc_freq,
        "threshold": vocab.threshold,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def load_vocabulary(path) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return Vocabulary(payload["terms"], payload["doc_freq"], payload["threshold"])


def save_matrix(dtm: DocTermMatrix, path) -> None:
    """Write the sparse triplet text format.

    Header line `n_docs n_terms nnz`, then one `row col weight` line per
    stored entry, weights printed with 17 significant digits.
    """
    coo = dtm.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{dtm.n_docs} {dtm.n_terms} {coo.nnz}\n")
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r} {c} {v:.17g}\n")


def load_matrix(path) -> DocTermMatrix:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise MalformedLineError("header must be 'n_docs n_terms nnz'", 1)
        n_docs, n_terms, nnz = (int(x) for x in header)
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.float64)
        for i in range(nnz):
            parts = fh.readline().split()
            if len(parts) != 3:
                raise MalformedLineError(
                    f"line {i + 2}: expected 'row col weight'", i + 2
                )
            rows[i], cols[i], vals[i] = int(parts[0]), int(parts[1]), float(parts[2])
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n_docs, n_terms))
    return DocTermMatrix(mat)


def prepare_corpus(docs: list[dict], stopwords: set[str]):
    """Clean, tokenize, build vocabulary and vectorize in one pass."""
    token_lists = [tokenize(clean_text(d["text"])) for d in docs]
    vocab = build_vocabulary(token_lists, stopwords)
    dtm = vectorize_tfidf(token_lists, vocab)
    if dtm.n_docs != len(docs):
        raise DimensionMismatchError("matrix rows do not match document count")
    return vocab, dtm
