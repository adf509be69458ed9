"""DFCM and EFCM topic-detection pipelines.

Both follow the same shape: transform the document-term matrix into a
low-dimensional space, run fuzzy c-means there, map the centroids back
to term space, rectify to nonnegative weights, and rank topic words.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import autoencoder as ae
from . import svd as tsvd
from .errors import DimensionMismatchError
from .fcm import FcmConfig, FcmResult, fcm_fit, kmeans_init
from .seeding import stage_seed
from .textprep import DocTermMatrix, Vocabulary


@dataclass
class PipelineConfig:
    method: str  # "dfcm" | "efcm"
    p: int
    c: int
    fcm: FcmConfig = None
    train: ae.TrainConfig = None  # dfcm only
    top_n: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("dfcm", "efcm"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.p < 1 or self.c < 1 or self.top_n < 1:
            raise ValueError("p, c and top_n must be >= 1")
        if self.fcm is None:
            self.fcm = FcmConfig(c=self.c)
        if self.train is None and self.method == "dfcm":
            self.train = ae.TrainConfig(epochs=100)


@dataclass
class Topic:
    words: list[tuple[str, float]]  # weight-descending
    full_vector_id: int  # row index into the stored topic-vector matrix


@dataclass
class TopicSet:
    topics: list[Topic]
    method: str
    config: dict
    warnings: list[str] = field(default_factory=list)


@dataclass
class DetectionResult:
    topic_set: TopicSet
    fcm_result: FcmResult
    topic_vectors: np.ndarray  # (c, n_terms), rectified
    model: ae.AutoencoderModel | None = None  # dfcm only
    train_trace: list[float] | None = None


def extract_top_words(mu: np.ndarray, vocab: Vocabulary, n: int):
    """Top-n largest-weight terms, ties broken lexicographically.

    Only strictly positive weights qualify; a warning is returned when
    fewer than n remain.
    """
    mu = np.asarray(mu).ravel()
    if mu.shape[0] != len(vocab):
        raise DimensionMismatchError(
            f"vector length {mu.shape[0]} != vocabulary size {len(vocab)}"
        )
    positive = [(float(mu[j]), vocab.terms[j]) for j in np.nonzero(mu > 0)[0]]
    positive.sort(key=lambda wt: (-wt[0], wt[1]))
    words = [(term, weight) for weight, term in positive[:n]]
    warning = None
    if len(words) < n:
        warning = f"only {len(words)} strictly positive weights available"
    return words, warning


def _build_topic_set(topic_vectors, vocab, method, cfg, extra_warnings=()):
    topics = []
    warnings = list(extra_warnings)
    for i, mu in enumerate(topic_vectors):
        if not np.any(mu > 0):
            warnings.append(f"topic {i} is degenerate: all weights zero")
        words, warn = extract_top_words(mu, vocab, cfg.top_n)
        if warn:
            warnings.append(f"topic {i}: {warn}")
        topics.append(Topic(words, i))
    snapshot = {
        "method": method,
        "p": cfg.p,
        "c": cfg.c,
        "top_n": cfg.top_n,
        "seed": cfg.seed,
        "fcm": vars(cfg.fcm),
        "train": None if cfg.train is None else vars(cfg.train),
    }
    return TopicSet(topics, method, snapshot, warnings)


def _cluster(X: np.ndarray, cfg: PipelineConfig) -> FcmResult:
    fcm_cfg = FcmConfig(
        c=cfg.c,
        f=cfg.fcm.f,
        max_iter=cfg.fcm.max_iter,
        eps=cfg.fcm.eps,
        seed=stage_seed(cfg.seed, "fcm-init"),
        init_runs=cfg.fcm.init_runs,
    )
    init = kmeans_init(X, fcm_cfg.c, fcm_cfg.init_runs, fcm_cfg.seed)
    return fcm_fit(X, fcm_cfg, init=init)


def dfcm_detect(D: DocTermMatrix, vocab: Vocabulary, cfg: PipelineConfig) -> DetectionResult:
    """Autoencoder pipeline: train, encode, cluster, decode, rectify, rank."""
    assert cfg.method == "dfcm"
    train_cfg = ae.TrainConfig(**{**vars(cfg.train), "seed": stage_seed(cfg.seed, "train")})
    model = ae.build_autoencoder(D.n_terms, cfg.p, seed=stage_seed(cfg.seed, "init"))
    ae.greedy_pretrain(D.matrix, model, train_cfg)
    model, trace = ae.fine_tune(D.matrix, model, train_cfg)

    codes = ae.encode(model, D.matrix)
    result = _cluster(codes, cfg)
    topic_vectors = np.maximum(0.0, ae.decode(model, result.centroids))
    topic_set = _build_topic_set(topic_vectors, vocab, "dfcm", cfg)
    return DetectionResult(topic_set, result, topic_vectors, model, trace)


def efcm_detect(D: DocTermMatrix, vocab: Vocabulary, cfg: PipelineConfig) -> DetectionResult:
    """Eigenspace pipeline: project by truncated SVD, cluster, back-project."""
    assert cfg.method == "efcm"
    decomp = tsvd.truncated_svd(D, cfg.p, seed=stage_seed(cfg.seed, "svd"))
    coords = tsvd.project(D, decomp)
    result = _cluster(coords, cfg)
    topic_vectors = np.maximum(0.0, tsvd.back_project(result.centroids, decomp))
    topic_set = _build_topic_set(topic_vectors, vocab, "efcm", cfg)
    return DetectionResult(topic_set, result, topic_vectors)


def detect(D: DocTermMatrix, vocab: Vocabulary, cfg: PipelineConfig) -> DetectionResult:
    if cfg.method == "dfcm":
        return dfcm_detect(D, vocab, cfg)
    return efcm_detect(D, vocab, cfg)


def save_topic_set(topic_set: TopicSet, path) -> None:
    payload = {
        "method": topic_set.method,
        "config": topic_set.config,
        "topics": [
            {
                "index": t.full_vector_id,
                "words": [{"term": term, "weight": weight} for term, weight in t.words],
            }
            for t in topic_set.topics
        ],
        "warnings": topic_set.warnings,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def load_topic_set(path) -> TopicSet:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    topics = [
        Topic([(w["term"], w["weight"]) for w in t["words"]], t["index"])
        for t in payload["topics"]
    ]
    return TopicSet(topics, payload["method"], payload["config"], payload["warnings"])
