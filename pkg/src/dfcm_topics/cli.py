"""Command-line front end: vectorize, detect, evaluate, compare."""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import coherence, textprep, topics
from .autoencoder import TrainConfig, save_checkpoint
from .errors import ConfigError, DfcmError, NonFiniteInputError, NonFiniteLossError
from .fcm import FcmConfig
from .seeding import stage_seed

log = logging.getLogger("dfcm_topics")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

_TOP_KEYS = {"seed", "method", "dim", "clusters", "top_n", "fcm", "train", "paths", "compare"}
_FCM_KEYS = {"fuzzifier", "max_iter", "eps", "init_runs"}
_TRAIN_KEYS = {
    "epochs", "batch_size", "learning_rate", "dropout_rate", "optimizer",
    "beta1", "beta2", "stabilizer", "momentum",
}
_PATH_KEYS = {"corpus", "stopwords", "vocabulary", "matrix", "embeddings", "out_dir"}
_COMPARE_KEYS = {"methods", "clusters", "epochs"}

DEFAULTS = {
    "method": "dfcm",
    "dim": 5,
    "clusters": 10,
    "top_n": 10,
    "fcm": {"fuzzifier": 1.1, "max_iter": 1000, "eps": 0.005, "init_runs": 10},
    "train": {
        "epochs": 100,
        "batch_size": 256,
        "learning_rate": 1e-3,
        "dropout_rate": 0.2,
        "optimizer": "adaptive_moments",
    },
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _check_keys(section: dict, allowed: set, where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def load_run_config(path) -> dict:
    """Read and validate the JSON run configuration, applying defaults."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "config")
    _check_keys(raw.get("fcm", {}), _FCM_KEYS, "config.fcm")
    _check_keys(raw.get("train", {}), _TRAIN_KEYS, "config.train")
    _check_keys(raw.get("paths", {}), _PATH_KEYS, "config.paths")
    _check_keys(raw.get("compare", {}), _COMPARE_KEYS, "config.compare")
    cfg = {
        "seed": raw.get("seed"),
        "method": raw.get("method", DEFAULTS["method"]),
        "dim": raw.get("dim", DEFAULTS["dim"]),
        "clusters": raw.get("clusters", DEFAULTS["clusters"]),
        "top_n": raw.get("top_n", DEFAULTS["top_n"]),
        "fcm": {**DEFAULTS["fcm"], **raw.get("fcm", {})},
        "train": {**DEFAULTS["train"], **raw.get("train", {})},
        "paths": dict(raw.get("paths", {})),
        "compare": dict(raw.get("compare", {})),
    }
    if cfg["method"] not in ("dfcm", "efcm"):
        raise ConfigError(f"config field 'method' must be 'dfcm' or 'efcm', got {cfg['method']!r}")
    return cfg


def _pipeline_config(cfg: dict, seed: int, method=None, clusters=None, epochs=None):
    method = method or cfg["method"]
    c = clusters if clusters is not None else cfg["clusters"]
    fcm_cfg = FcmConfig(
        c=c,
        f=cfg["fcm"]["fuzzifier"],
        max_iter=cfg["fcm"]["max_iter"],
        eps=cfg["fcm"]["eps"],
        init_runs=cfg["fcm"]["init_runs"],
    )
    train_cfg = None
    if method == "dfcm":
        train = dict(cfg["train"])
        if epochs is not None:
            train["epochs"] = epochs
        train_cfg = TrainConfig(**train)
    return topics.PipelineConfig(
        method=method,
        p=cfg["dim"],
        c=c,
        fcm=fcm_cfg,
        train=train_cfg,
        top_n=cfg["top_n"],
        seed=seed,
    )


def _apply_overrides(cfg: dict, args) -> dict:
    over = {
        "method": args.method,
        "dim": args.dim,
        "clusters": args.clusters,
        "top_n": args.top_n,
    }
    for key, val in over.items():
        if val is not None:
            cfg[key] = val
    fcm_over = {
        "fuzzifier": args.fuzzifier,
        "max_iter": args.max_iter,
        "eps": args.eps,
        "init_runs": args.init_runs,
    }
    for key, val in fcm_over.items():
        if val is not None:
            cfg["fcm"][key] = val
    train_over = {
        "epochs": args.epochs,
        "batch_size": args.batch_size,
        "learning_rate": args.learning_rate,
        "dropout_rate": args.dropout,
    }
    for key, val in train_over.items():
        if val is not None:
            cfg["train"][key] = val
    for key in ("matrix", "vocabulary", "embeddings", "out_dir"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            cfg["paths"][key] = val
    return cfg


def _require_path(cfg, key):
    path = cfg["paths"].get(key)
    if not path:
        raise ConfigError(f"config.paths.{key} is required")
    return path


def _load_artifacts(cfg):
    vocab = textprep.load_vocabulary(_require_path(cfg, "vocabulary"))
    dtm = textprep.load_matrix(_require_path(cfg, "matrix"))
    if dtm.n_terms != len(vocab):
        raise ConfigError(
            f"matrix has {dtm.n_terms} columns but vocabulary has {len(vocab)} terms"
        )
    return vocab, dtm


def _save_memberships(M: np.ndarray, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def cmd_vectorize(args) -> int:
    docs = textprep.read_corpus_jsonl(args.corpus)
    stopwords = textprep.load_stopwords(args.stopwords) if args.stopwords else set()
    vocab, dtm = textprep.prepare_corpus(docs, stopwords)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    textprep.save_vocabulary(vocab, out / "vocabulary.json")
    textprep.save_matrix(dtm, out / "matrix.txt")
    print(f"documents: {dtm.n_docs}")
    print(f"vocabulary: {len(vocab)} (threshold {vocab.threshold})")
    print(f"nonzeros: {dtm.nnz}")
    return EXIT_OK


def _run_detection(vocab, dtm, pipe_cfg, out: Path):
    result = topics.detect(dtm, vocab, pipe_cfg)
    out.mkdir(parents=True, exist_ok=True)
    topics.save_topic_set(result.topic_set, out / "topics.json")
    _save_memberships(result.fcm_result.memberships, out / "memberships.txt")
    with open(out / "objective_trace.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "objective_trace": result.fcm_result.objective_trace,
                "iterations": result.fcm_result.iterations,
                "converged": result.fcm_result.converged,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    if result.model is not None:
        final_loss = result.train_trace[-1] if result.train_trace else None
        save_checkpoint(result.model, out / "model.bin", pipe_cfg.train, final_loss)
    return result


def cmd_detect(args) -> int:
    cfg = _apply_overrides(load_run_config(args.config), args)
    vocab, dtm = _load_artifacts(cfg)
    pipe_cfg = _pipeline_config(cfg, args.seed)
    out = Path(_require_path(cfg, "out_dir"))
    result = _run_detection(vocab, dtm, pipe_cfg, out)
    for warning in result.topic_set.warnings:
        log.warning("%s", warning)
    print(f"wrote {out / 'topics.json'} ({len(result.topic_set.topics)} topics)")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    topic_set = topics.load_topic_set(args.topics)
    store = coherence.load_word_vectors(args.embeddings)
    report = coherence.evaluate(topic_set, store)
    out = Path(args.out) if args.out else Path(args.topics).with_name("coherence.json")
    coherence.save_report(report, out)
    print(f"mean TC-W2V: {report.mean_score:.6f} "
          f"({len(report.per_topic)} scored, {len(report.skipped_topics)} skipped)")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = load_run_config(args.config)
    comp = cfg["compare"]
    methods = comp.get("methods", ["dfcm", "efcm"])
    cluster_list = comp.get("clusters", [cfg["clusters"]])
    epoch_list = comp.get("epochs", [cfg["train"]["epochs"]])
    vocab, dtm = _load_artifacts(cfg)
    store = coherence.load_word_vectors(_require_path(cfg, "embeddings"))
    out = Path(_require_path(cfg, "out_dir"))
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for method in methods:
        for c in cluster_list:
            for epochs in epoch_list:
                cell_seed = stage_seed(args.seed, method, c, epochs)
                cell_dir = out / f"{method}_c{c}_e{epochs}"
                try:
                    pipe_cfg = _pipeline_config(
                        cfg, cell_seed, method=method, clusters=c, epochs=epochs
                    )
                    result = _run_detection(vocab, dtm, pipe_cfg, cell_dir)
                    report = coherence.evaluate(result.topic_set, store)
                    rows.append({
                        "method": method,
                        "p": cfg["dim"],
                        "c": c,
                        "epochs": epochs if method == "dfcm" else "",
                        "mean_score": f"{report.mean_score:.17g}",
                        "topic_scores": ";".join(
                            f"{s:.17g}" for _, s, _ in report.per_topic
                        ),
                        "status": "ok",
                    })
                except DfcmError as exc:
                    log.error("cell (%s, c=%d, epochs=%s) failed: %s", method, c, epochs, exc)
                    rows.append({
                        "method": method,
                        "p": cfg["dim"],
                        "c": c,
                        "epochs": epochs if method == "dfcm" else "",
                        "mean_score": "",
                        "topic_scores": "",
                        "status": f"error: {exc}",
                    })
                if method == "efcm":
                    break  # epochs are a DFCM-only axis

    csv_path = out / "compare.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(
            fh,
            fieldnames=["method", "p", "c", "epochs", "mean_score", "topic_scores", "status"],
        )
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {csv_path} ({len(rows)} cells)")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="dfcm-topics", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    vec = sub.add_parser("vectorize", help="clean, prune and TF-IDF weight a corpus")
    vec.add_argument("--corpus", required=True, help="JSON-lines corpus file")
    vec.add_argument("--stopwords", help="one-term-per-line stopword file")
    vec.add_argument("--out-dir", required=True)
    vec.set_defaults(func=cmd_vectorize)

    det = sub.add_parser("detect", help="run a topic-detection pipeline")
    det.add_argument("--config", required=True, help="run configuration JSON")
    det.add_argument("--seed", type=int, required=True)
    det.add_argument("--method", choices=["dfcm", "efcm"])
    det.add_argument("--dim", type=int, help="low-dimensional representation size p")
    det.add_argument("--clusters", type=int, help="number of topics c")
    det.add_argument("--fuzzifier", type=float)
    det.add_argument("--max-iter", type=int)
    det.add_argument("--eps", type=float)
    det.add_argument("--init-runs", type=int)
    det.add_argument("--epochs", type=int)
    det.add_argument("--batch-size", type=int)
    det.add_argument("--learning-rate", type=float)
    det.add_argument("--dropout", type=float)
    det.add_argument("--top-n", type=int)
    det.add_argument("--matrix")
    det.add_argument("--vocabulary")
    det.add_argument("--out-dir")
    det.set_defaults(func=cmd_detect)

    ev = sub.add_parser("evaluate", help="score a topic set with TC-W2V")
    ev.add_argument("--topics", required=True)
    ev.add_argument("--embeddings", required=True)
    ev.add_argument("--out")
    ev.set_defaults(func=cmd_evaluate)

    cmp_ = sub.add_parser("compare", help="sweep methods/topic counts/epochs")
    cmp_.add_argument("--config", required=True)
    cmp_.add_argument("--seed", type=int, required=True)
    cmp_.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (NonFiniteLossError, NonFiniteInputError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except (DfcmError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
