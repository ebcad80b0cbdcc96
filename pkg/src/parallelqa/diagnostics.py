"""Sentence-retrieval diagnostics: how often the most question-similar sentence holds the answer.

For every QA item the passage(s) are split into sentences, each sentence is
scored against the question under one lexical metric, and the item counts as
a hit when the top sentence contains any gold answer. Low hit rates mean
lexical matching alone cannot locate answers in the dataset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import lexmetrics
from .datastore import AnswerSpan, Dataset, QAExample
from .lexmetrics import CorpusStats, DEFAULT_B, DEFAULT_K1, METRICS
from .textproc import SentenceSpan, TokenizedText, normalize_answer, split_sentences, tokenize

PASSAGE_SEPARATOR = "\n"


@dataclass(frozen=True)
class RetrievalItem:
    qa_id: str
    top_sentence_index: int
    hit: bool


@dataclass(frozen=True)
class RetrievalReport:
    metric: str
    total: int
    hits: int
    rate: float
    per_item: tuple[RetrievalItem, ...]


@dataclass(frozen=True)
class PassageView:
    """One QA item's passages concatenated and pre-split for scoring."""

    text: str
    spans: tuple[SentenceSpan, ...]
    sentence_tokens: tuple[TokenizedText, ...]
    stats: CorpusStats


def build_view(item: QAExample) -> PassageView:
    text = PASSAGE_SEPARATOR.join(item.passages)
    spans = tuple(split_sentences(text))
    if not spans:
        raise ValueError(f"item {item.qa_id}: empty passage")
    sent_tokens = tuple(tokenize(text[s.char_start : s.char_end]) for s in spans)
    stats = lexmetrics.build_corpus_stats(list(sent_tokens))
    return PassageView(text=text, spans=spans, sentence_tokens=sent_tokens, stats=stats)


def global_answer_start(item: QAExample, answer: AnswerSpan) -> int | None:
    """Answer offset within the concatenated passage text."""
    if answer.char_start is None:
        return None
    shift = sum(len(p) + len(PASSAGE_SEPARATOR) for p in item.passages[: answer.passage_index])
    return answer.char_start + shift


def score_sentences(
    question: TokenizedText,
    view: PassageView,
    metric: str,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> list[float]:
    if metric == "jaccard":
        return [lexmetrics.jaccard(question, s) for s in view.sentence_tokens]
    if metric == "tfidf":
        qv = lexmetrics.tfidf_vector(question, view.stats)
        return [
            lexmetrics.cosine(qv, lexmetrics.tfidf_vector(s, view.stats))
            for s in view.sentence_tokens
        ]
    if metric == "bm25":
        return [
            lexmetrics.bm25(question, s, view.stats, k1=k1, b=b)
            for s in view.sentence_tokens
        ]
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def rank_sentences(
    question: TokenizedText,
    view: PassageView,
    metric: str,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> list[tuple[int, float]]:
    """All sentences ordered by score descending, ties broken by lower index."""
    scores = score_sentences(question, view, metric, k1=k1, b=b)
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return [(i, scores[i]) for i in order]


def top_sentence(
    question: TokenizedText,
    view: PassageView,
    metric: str,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> tuple[int, float]:
    return rank_sentences(question, view, metric, k1=k1, b=b)[0]


def contains_answer(
    sentence: SentenceSpan,
    passage_text: str,
    answer_text: str,
    char_start: int | None = None,
) -> bool:
    """Char-span overlap when the gold offset is known, else normalized substring."""
    if char_start is not None:
        return char_start < sentence.char_end and sentence.char_start < char_start + len(answer_text)
    sent_text = passage_text[sentence.char_start : sentence.char_end]
    return normalize_answer(answer_text) in normalize_answer(sent_text)


def retrieval_rate(
    dataset: Dataset,
    metric: str,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> RetrievalReport:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    per_item = []
    hits = 0
    for item in dataset.items:
        if not item.answers:
            raise ValueError(f"item {item.qa_id}: no gold answers")
        view = build_view(item)
        question = tokenize(item.question)
        idx, _ = top_sentence(question, view, metric, k1=k1, b=b)
        hit = any(
            contains_answer(view.spans[idx], view.text, ans.text, global_answer_start(item, ans))
            for ans in item.answers
        )
        hits += hit
        per_item.append(RetrievalItem(qa_id=item.qa_id, top_sentence_index=idx, hit=hit))
    total = len(per_item)
    return RetrievalReport(
        metric=metric,
        total=total,
        hits=hits,
        rate=hits / total if total else 0.0,
        per_item=tuple(per_item),
    )


# --------------------------------------------------------------------------
# rendering (shared verbatim by the CLI and the HTTP service)


def report_to_dict(report: RetrievalReport) -> dict:
    return {
        "metric": report.metric,
        "total": report.total,
        "hits": report.hits,
        "rate": report.rate,
        "per_item": [
            {"qa_id": it.qa_id, "top_sentence_index": it.top_sentence_index, "hit": it.hit}
            for it in report.per_item
        ],
    }


def render_report_json(reports: list[RetrievalReport]) -> str:
    if len(reports) == 1:
        payload: object = report_to_dict(reports[0])
    else:
        payload = {"reports": [report_to_dict(r) for r in reports]}
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)


def render_report_table(reports: list[RetrievalReport]) -> str:
    lines = [f"{'Metric':<10} {'Rate':>8}  {'Hits':>10}"]
    for r in reports:
        lines.append(f"{r.metric:<10} {100.0 * r.rate:>7.2f}%  {r.hits:>4}/{r.total:<4}")
    return "\n".join(lines)
