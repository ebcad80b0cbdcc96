"""Deterministic synthetic corpora: two groups with disjoint vocabularies."""

from __future__ import annotations

import numpy as np

from parallelqa.textproc import RawDocument, TokenizedText, tokenize

VOCAB_A = [
    "granite", "basalt", "quartz", "magma", "sediment", "erosion", "volcano",
    "tectonic", "mineral", "fossil", "stratum", "glacier", "moraine", "fault",
    "crust", "mantle", "seismic", "lava", "bedrock", "canyon",
]
VOCAB_B = [
    "violin", "cello", "sonata", "orchestra", "tempo", "melody", "harmony",
    "conductor", "concerto", "rhythm", "chord", "opera", "soprano", "quartet",
    "symphony", "crescendo", "aria", "fugue", "overture", "cadence",
]


def make_doc_text(rng: np.random.Generator, vocab: list[str], length: int) -> str:
    words = [vocab[int(i)] for i in rng.integers(0, len(vocab), size=length)]
    return " ".join(words)


def two_group_corpus(
    seed: int = 7,
    docs_per_group: int = 20,
    doc_len: int = 50,
) -> tuple[list[TokenizedText], list[int]]:
    """Tokenized docs plus their group labels (0 = VOCAB_A, 1 = VOCAB_B)."""
    rng = np.random.default_rng(seed)
    docs = []
    labels = []
    for group, vocab in enumerate((VOCAB_A, VOCAB_B)):
        for _ in range(docs_per_group):
            docs.append(tokenize(make_doc_text(rng, vocab, doc_len)))
            labels.append(group)
    return docs, labels


def two_group_raw_docs(
    seed: int = 7,
    per_group: int = 2,
    doc_len: int = 80,
    source: str = "news",
    prefix: str = "doc",
) -> tuple[list[RawDocument], list[int]]:
    rng = np.random.default_rng(seed)
    docs = []
    labels = []
    for group, vocab in enumerate((VOCAB_A, VOCAB_B)):
        for i in range(per_group):
            docs.append(
                RawDocument(
                    id=f"{prefix}-{group}-{i}",
                    source=source,
                    title="",
                    text=make_doc_text(rng, vocab, doc_len) + ".",
                )
            )
            labels.append(group)
    return docs, labels
