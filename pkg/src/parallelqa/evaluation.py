"""Exact-match / token-F1 scoring of prediction files, plus error categories.

Scoring follows the SQuAD convention: answers are normalized (lowercase, no
punctuation, no articles) and each prediction takes the best score over all
gold variants. Wrong predictions are sorted into coarse categories — almost
right (boundary_error), drawn from the lexically most question-similar
sentence (high_overlap_wrong_sentence), or neither (other_wrong).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, replace

from .datastore import Dataset, QAExample
from .diagnostics import (
    PassageView,
    build_view,
    contains_answer,
    global_answer_start,
    top_sentence,
)
from .textproc import answer_tokens, normalize_answer, tokenize

CATEGORY_CORRECT = "correct"
CATEGORY_HIGH_OVERLAP = "high_overlap_wrong_sentence"
CATEGORY_BOUNDARY = "boundary_error"
CATEGORY_OTHER = "other_wrong"
CATEGORIES = (CATEGORY_CORRECT, CATEGORY_HIGH_OVERLAP, CATEGORY_BOUNDARY, CATEGORY_OTHER)


@dataclass(frozen=True)
class EvalItem:
    qa_id: str
    em: int
    f1: float
    category: str | None = None


@dataclass(frozen=True)
class EvalReport:
    total: int
    em: float  # percentage
    f1: float  # percentage
    per_item: tuple[EvalItem, ...]
    missing: tuple[str, ...] = ()


def exact_match(pred: str, golds: list[str]) -> int:
    if not golds:
        raise ValueError("empty gold answers")
    norm = normalize_answer(pred)
    return int(any(norm == normalize_answer(g) for g in golds))


def _f1_single(pred_tokens: list[str], gold_tokens: list[str]) -> float:
    if not pred_tokens or not gold_tokens:
        return float(pred_tokens == gold_tokens)
    common = Counter(pred_tokens) & Counter(gold_tokens)
    overlap = sum(common.values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_tokens)
    recall = overlap / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def f1_score(pred: str, golds: list[str]) -> float:
    """Best token-multiset F1 over the gold variants, in [0, 1]."""
    if not golds:
        raise ValueError("empty gold answers")
    pred_tokens = answer_tokens(pred)
    return max(_f1_single(pred_tokens, answer_tokens(g)) for g in golds)


def evaluate(dataset: Dataset, predictions: dict[str, str]) -> EvalReport:
    """Score every dataset item; missing predictions score 0 and are listed."""
    per_item = []
    missing = []
    for item in dataset.items:
        if not item.answers:
            raise ValueError(f"item {item.qa_id}: no gold answers")
        golds = [a.text for a in item.answers]
        if item.qa_id in predictions:
            pred = predictions[item.qa_id]
            em = exact_match(pred, golds)
            f1 = f1_score(pred, golds)
        else:
            missing.append(item.qa_id)
            em, f1 = 0, 0.0
        per_item.append(EvalItem(qa_id=item.qa_id, em=em, f1=f1))
    total = len(per_item)
    if total == 0:
        return EvalReport(total=0, em=0.0, f1=0.0, per_item=(), missing=tuple(missing))
    return EvalReport(
        total=total,
        em=100.0 * sum(it.em for it in per_item) / total,
        f1=100.0 * sum(it.f1 for it in per_item) / total,
        per_item=tuple(per_item),
        missing=tuple(missing),
    )


def _predicted_sentence(view: PassageView, pred: str) -> int | None:
    """Sentence index holding the first case-insensitive occurrence of pred."""
    needle = pred.strip().lower()
    if not needle:
        return None
    pos = view.text.lower().find(needle)
    if pos == -1:
        return None
    for span in view.spans:
        if span.char_start <= pos < span.char_end:
            return span.index
    return None


def categorize_errors(
    dataset: Dataset,
    predictions: dict[str, str],
    metric: str = "jaccard",
) -> dict[str, str]:
    """Assign one category per item.

    correct (em = 1); boundary_error (partial token overlap with a gold);
    high_overlap_wrong_sentence (prediction sits in the metric's top sentence
    and that sentence lacks every gold answer); other_wrong covers the rest,
    including categories that would need semantic or entity-type modeling.
    """
    out: dict[str, str] = {}
    for item in dataset.items:
        golds = [a.text for a in item.answers]
        pred = predictions.get(item.qa_id, "")
        if golds and exact_match(pred, golds):
            out[item.qa_id] = CATEGORY_CORRECT
            continue
        if golds and f1_score(pred, golds) > 0.0:
            out[item.qa_id] = CATEGORY_BOUNDARY
            continue
        view = build_view(item)
        pred_idx = _predicted_sentence(view, pred)
        if pred_idx is None:
            out[item.qa_id] = CATEGORY_OTHER
            continue
        top_idx, _ = top_sentence(tokenize(item.question), view, metric)
        gold_in_top = any(
            contains_answer(view.spans[top_idx], view.text, ans.text, global_answer_start(item, ans))
            for ans in item.answers
        )
        if pred_idx == top_idx and not gold_in_top:
            out[item.qa_id] = CATEGORY_HIGH_OVERLAP
        else:
            out[item.qa_id] = CATEGORY_OTHER
    return out


def with_categories(report: EvalReport, categories: dict[str, str]) -> EvalReport:
    items = tuple(replace(it, category=categories.get(it.qa_id)) for it in report.per_item)
    return replace(report, per_item=items)


# --------------------------------------------------------------------------
# rendering (shared verbatim by the CLI and the HTTP service)


def report_to_dict(report: EvalReport) -> dict:
    return {
        "total": report.total,
        "em": report.em,
        "f1": report.f1,
        "missing": list(report.missing),
        "per_item": [
            {"qa_id": it.qa_id, "em": it.em, "f1": it.f1, "category": it.category}
            for it in report.per_item
        ],
    }


def render_report_json(report: EvalReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True, ensure_ascii=False)


def render_report_table(report: EvalReport) -> str:
    lines = [
        f"Total  {report.total}",
        f"EM     {report.em:.2f}",
        f"F1     {report.f1:.2f}",
    ]
    counts = Counter(it.category for it in report.per_item if it.category)
    for cat in CATEGORIES:
        if counts:
            lines.append(f"{cat:<28} {counts.get(cat, 0)}")
    if report.missing:
        lines.append(f"missing predictions: {len(report.missing)}")
    return "\n".join(lines)
