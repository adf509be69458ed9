import numpy as np
import pytest

from dfcm_topics import textprep


def planted_corpus(seed, n_docs=300, n_sets=3, set_size=20, doc_len=15):
    """Synthetic corpus with disjoint per-topic vocabularies.

    Returns (vocab_sets, token_lists, labels); document d draws all its
    tokens from set d % n_sets.
    """
    rng = np.random.default_rng(seed)
    sets = [
        [f"topic{t}word{j:02d}" for j in range(set_size)] for t in range(n_sets)
    ]
    docs, labels = [], []
    for d in range(n_docs):
        t = d % n_sets
        docs.append(list(rng.choice(sets[t], size=doc_len, replace=True)))
        labels.append(t)
    return sets, docs, labels


def planted_matrix(seed, **kwargs):
    sets, docs, labels = planted_corpus(seed, **kwargs)
    vocab = textprep.build_vocabulary(docs, set())
    dtm = textprep.vectorize_tfidf(docs, vocab)
    return sets, vocab, dtm, labels


def write_planted_embeddings(path, vocab_sets, dim=None):
    """One orthogonal basis vector per planted set: within-set cosine 1,
    cross-set cosine 0."""
    dim = dim or len(vocab_sets)
    with open(path, "w", encoding="utf-8") as fh:
        total = sum(len(s) for s in vocab_sets)
        fh.write(f"{total} {dim}\n")
        for t, words in enumerate(vocab_sets):
            vec = ["0"] * dim
            vec[t] = "1"
            for w in words:
                fh.write(f"{w} {' '.join(vec)}\n")


def topic_recovery(topic_set, vocab_sets, min_fraction=0.8):
    """Check a bijective topic<->planted-set match with enough top words
    drawn from the matched set. Returns (ok, per-topic best fractions)."""
    assignment, fractions = [], []
    for topic in topic_set.topics:
        terms = [w for w, _ in topic.words]
        fracs = [
            sum(1 for w in terms if w in s) / max(1, len(terms)) for s in vocab_sets
        ]
        best = int(np.argmax(fracs))
        assignment.append(best)
        fractions.append(fracs[best])
    bijective = len(set(assignment)) == len(vocab_sets)
    ok = bijective and all(f >= min_fraction for f in fractions)
    return ok, fractions


def blob_dataset(seed=7, centers=((0.0, 0.0), (5.0, 0.0), (0.0, 5.0)), n_per=20, sigma=0.1):
    """Three well-separated 2-D Gaussian blobs with known labels."""
    rng = np.random.default_rng(seed)
    X, labels = [], []
    for i, center in enumerate(centers):
        X.append(rng.normal(loc=center, scale=sigma, size=(n_per, 2)))
        labels += [i] * n_per
    return np.vstack(X), np.array(labels), np.array(centers)


@pytest.fixture
def blobs():
    return blob_dataset()
