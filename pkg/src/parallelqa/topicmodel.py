"""Latent Dirichlet Allocation trained with collapsed Gibbs sampling.

Documents get "topic vectors" (their inferred topic mixture) used as a
style-robust similarity signal when pairing passages from different sources.
Training is seeded and single-threaded, so (corpus, config) fully determines
the model; a trained model is immutable and safe for concurrent inference.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._assets import asset_lines
from .textproc import TokenizedText

MODEL_FORMAT = "lda-1"
MIN_TERM_COUNT = 2

_STOPWORDS = asset_lines("stopwords.txt")

SweepCallback = Callable[[int, np.ndarray, int], None]


@dataclass(frozen=True)
class LdaConfig:
    num_topics: int = 50
    alpha: float | None = None  # defaults to 50 / num_topics
    beta: float = 0.01
    iterations: int = 1000
    seed: int = 0

    def resolved_alpha(self) -> float:
        return 50.0 / self.num_topics if self.alpha is None else self.alpha

    def __post_init__(self) -> None:
        if self.num_topics < 1:
            raise ValueError("num_topics must be >= 1")
        if self.resolved_alpha() <= 0:
            raise ValueError("alpha must be > 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass
class TopicModel:
    num_topics: int
    vocab: tuple[str, ...]
    topic_word_counts: np.ndarray  # (K, V) int64
    topic_totals: np.ndarray  # (K,) int64
    alpha: float
    beta: float
    # Per-document assignment counts from training; not persisted.
    doc_topic_counts: np.ndarray | None = None

    def vocab_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.vocab)}


@dataclass(frozen=True)
class TopicVector:
    weights: tuple[float, ...]


def build_vocab(corpus: list[TokenizedText]) -> tuple[str, ...]:
    """Case-folded terms with corpus frequency >= 2, minus stopwords, sorted."""
    counts: dict[str, int] = {}
    for doc in corpus:
        for term in doc.folded:
            counts[term] = counts.get(term, 0) + 1
    return tuple(
        sorted(t for t, c in counts.items() if c >= MIN_TERM_COUNT and t not in _STOPWORDS)
    )


def _doc_ids(doc: TokenizedText, index: dict[str, int]) -> list[int]:
    return [index[t] for t in doc.folded if t in index]


def train_lda(
    corpus: list[TokenizedText],
    config: LdaConfig,
    on_sweep: SweepCallback | None = None,
) -> TopicModel:
    """Run collapsed Gibbs sampling over the corpus.

    Each sweep resamples every in-vocabulary token's topic from
    p(z=k | rest) proportional to (n_dk + alpha)(n_kw + beta)/(n_k + V*beta).
    ``on_sweep(sweep_index, topic_totals, total_tokens)`` fires after every
    full sweep, which is how the count-conservation invariant is audited.
    """
    if not corpus:
        raise ValueError("empty corpus")
    k = config.num_topics
    total_tokens = sum(len(d.tokens) for d in corpus)
    if total_tokens < k:
        raise ValueError(f"corpus has {total_tokens} tokens but {k} topics requested")

    alpha = config.resolved_alpha()
    beta = config.beta
    vocab = build_vocab(corpus)
    index = {t: i for i, t in enumerate(vocab)}
    v = len(vocab)
    docs = [_doc_ids(d, index) for d in corpus]
    n_total = sum(len(d) for d in docs)

    rng = np.random.default_rng(config.seed)
    assignments = [rng.integers(0, k, size=len(d)).tolist() for d in docs]

    # Plain lists in the sampling loop; converted to arrays at the end.
    n_dk = [[0] * k for _ in docs]
    n_kw = [[0] * v for _ in range(k)]
    n_k = [0] * k
    for d, (ids, zs) in enumerate(zip(docs, assignments)):
        for w, z in zip(ids, zs):
            n_dk[d][z] += 1
            n_kw[z][w] += 1
            n_k[z] += 1

    vbeta = v * beta
    probs = [0.0] * k
    for sweep in range(config.iterations):
        for d, ids in enumerate(docs):
            zs = assignments[d]
            row = n_dk[d]
            for i, w in enumerate(ids):
                z = zs[i]
                row[z] -= 1
                n_kw[z][w] -= 1
                n_k[z] -= 1
                total = 0.0
                for t in range(k):
                    p = (row[t] + alpha) * (n_kw[t][w] + beta) / (n_k[t] + vbeta)
                    probs[t] = p
                    total += p
                u = rng.random() * total
                acc = 0.0
                z = k - 1
                for t in range(k):
                    acc += probs[t]
                    if u < acc:
                        z = t
                        break
                zs[i] = z
                row[z] += 1
                n_kw[z][w] += 1
                n_k[z] += 1
        if on_sweep is not None:
            on_sweep(sweep, np.asarray(n_k, dtype=np.int64), n_total)

    return TopicModel(
        num_topics=k,
        vocab=vocab,
        topic_word_counts=np.asarray(n_kw, dtype=np.int64),
        topic_totals=np.asarray(n_k, dtype=np.int64),
        alpha=alpha,
        beta=beta,
        doc_topic_counts=np.asarray(n_dk, dtype=np.int64),
    )


def infer_topics(
    model: TopicModel,
    doc: TokenizedText,
    iterations: int = 100,
    seed: int = 0,
) -> TopicVector:
    """Topic mixture for an unseen document, holding the trained counts fixed.

    Out-of-vocabulary tokens are skipped; a document with none in vocabulary
    gets the uniform vector.
    """
    k = model.num_topics
    alpha = model.alpha
    ids = _doc_ids(doc, model.vocab_index())
    if not ids:
        return TopicVector(weights=tuple([1.0 / k] * k))

    beta = model.beta
    vbeta = len(model.vocab) * beta
    n_kw = model.topic_word_counts
    n_k = model.topic_totals

    rng = np.random.default_rng(seed)
    zs = rng.integers(0, k, size=len(ids)).tolist()
    counts = [0] * k
    for z in zs:
        counts[z] += 1

    probs = [0.0] * k
    for _ in range(iterations):
        for i, w in enumerate(ids):
            z = zs[i]
            counts[z] -= 1
            total = 0.0
            for t in range(k):
                p = (counts[t] + alpha) * (int(n_kw[t, w]) + beta) / (int(n_k[t]) + vbeta)
                probs[t] = p
                total += p
            u = rng.random() * total
            acc = 0.0
            z = k - 1
            for t in range(k):
                acc += probs[t]
                if u < acc:
                    z = t
                    break
            zs[i] = z
            counts[z] += 1

    denom = len(ids) + k * alpha
    return TopicVector(weights=tuple((counts[t] + alpha) / denom for t in range(k)))


def topic_cosine(a: TopicVector, b: TopicVector) -> float:
    dot = sum(x * y for x, y in zip(a.weights, b.weights))
    na = math.sqrt(sum(x * x for x in a.weights))
    nb = math.sqrt(sum(y * y for y in b.weights))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def save_model(model: TopicModel, path: str | Path) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "num_topics": model.num_topics,
        "alpha": model.alpha,
        "beta": model.beta,
        "vocab": list(model.vocab),
        "topic_word_counts": model.topic_word_counts.tolist(),
    }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> TopicModel:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if obj.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: unsupported model format {obj.get('format')!r}")
    counts = np.asarray(obj["topic_word_counts"], dtype=np.int64)
    if counts.ndim != 2 or counts.shape[0] != obj["num_topics"] or counts.shape[1] != len(obj["vocab"]):
        raise ValueError(f"{path}: count matrix shape mismatch")
    return TopicModel(
        num_topics=int(obj["num_topics"]),
        vocab=tuple(obj["vocab"]),
        topic_word_counts=counts,
        topic_totals=counts.sum(axis=1),
        alpha=float(obj["alpha"]),
        beta=float(obj["beta"]),
    )
