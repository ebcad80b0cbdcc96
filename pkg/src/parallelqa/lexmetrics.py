"""Lexical similarity scorers over question/sentence token multisets.

Three scorers share one contract: higher means more lexically similar, and
given equal inputs the result is bit-reproducible (floating-point sums always
run in lexicographic term order).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .textproc import TokenizedText

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75

METRICS = ("jaccard", "tfidf", "bm25")


@dataclass(frozen=True)
class CorpusStats:
    """Collection statistics over a set of tokenized documents.

    ``doc_freq`` counts documents containing each case-folded term at least
    once (document frequency, not term frequency).
    """

    num_docs: int
    doc_freq: dict[str, int]
    avg_doc_len: float
    total_docs_len: int


@dataclass(frozen=True)
class SparseVector:
    """Term-weight vector; zero weights are never stored explicitly."""

    entries: dict[str, float]

    def norm(self) -> float:
        return math.sqrt(sum(w * w for _, w in sorted(self.entries.items())))


def build_corpus_stats(docs: list[TokenizedText]) -> CorpusStats:
    if not docs:
        raise ValueError("empty corpus")
    df: Counter[str] = Counter()
    total = 0
    for doc in docs:
        total += len(doc.tokens)
        df.update(set(doc.folded))
    return CorpusStats(
        num_docs=len(docs),
        doc_freq=dict(df),
        avg_doc_len=total / len(docs),
        total_docs_len=total,
    )


def jaccard(a: TokenizedText, b: TokenizedText) -> float:
    """Set Jaccard over case-folded tokens; 0.0 when both sets are empty."""
    sa, sb = set(a.folded), set(b.folded)
    union = len(sa | sb)
    if union == 0:
        return 0.0
    return len(sa & sb) / union


def tfidf_vector(doc: TokenizedText, stats: CorpusStats) -> SparseVector:
    """Raw-count tf times smoothed idf ln((N+1)/(df+1)).

    The +1 smoothing keeps unseen terms (df = 0) finite and zeroes out terms
    present in every document; zero weights are dropped.
    """
    counts = Counter(doc.folded)
    n = stats.num_docs
    entries: dict[str, float] = {}
    for term in sorted(counts):
        weight = counts[term] * math.log((n + 1) / (stats.doc_freq.get(term, 0) + 1))
        if weight != 0.0:
            entries[term] = weight
    return SparseVector(entries)


def cosine(a: SparseVector, b: SparseVector) -> float:
    """Standard cosine; 0.0 if either vector has zero norm."""
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        return 0.0
    dot = 0.0
    for term in sorted(a.entries.keys() & b.entries.keys()):
        dot += a.entries[term] * b.entries[term]
    return dot / (na * nb)


def bm25(
    query: TokenizedText,
    doc: TokenizedText,
    stats: CorpusStats,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> float:
    """Okapi BM25 with non-negative idf ln(1 + (N - df + 0.5)/(df + 0.5)).

    Repeated query terms multiply their summand by the query-side count.
    """
    if stats.avg_doc_len <= 0:
        raise ValueError("avg_doc_len must be positive")
    qcounts = Counter(query.folded)
    dcounts = Counter(doc.folded)
    n = stats.num_docs
    length_norm = k1 * (1 - b + b * len(doc.tokens) / stats.avg_doc_len)
    score = 0.0
    for term in sorted(qcounts):
        tf = dcounts.get(term, 0)
        if tf == 0:
            continue
        df = stats.doc_freq.get(term, 0)
        idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
        score += qcounts[term] * idf * tf * (k1 + 1) / (tf + length_norm)
    return score
