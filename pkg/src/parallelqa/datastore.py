"""Dataset schemas, loaders, validation, statistics, and durable annotation storage.

Two on-disk formats are understood: the native parallel-passage format
(versioned ``pqa-1``) and read-only SQuAD v1.1 JSON. Both map into a common
single/dual-passage view (:class:`Dataset`) consumed by the diagnostics and
evaluation modules. All character offsets are Unicode scalar-value indices
into the stored passage strings.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

from .textproc import tokenize

SCHEMA_VERSION = "pqa-1"
SOURCE_KINDS = ("news", "wiki", "other")
INFERENCE_TYPES = (
    "referential",
    "figurative",
    "part_whole",
    "numeric",
    "lexical",
    "denotation",
    "spatial",
    "temporal",
)
MAX_ANSWER_TOKENS = 50
OFFSET_REPAIR_WINDOW = 5


class DatasetError(ValueError):
    """Malformed dataset file or schema violation; message names the JSON path."""


class UnknownPairError(KeyError):
    pass


class AnnotationRejected(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


# --------------------------------------------------------------------------
# storage model (pqa-1)


@dataclass(frozen=True)
class Passage:
    source_kind: str
    origin_id: str
    text: str


@dataclass(frozen=True)
class QAAnswer:
    text: str
    passage_index: int
    char_start: int


@dataclass(frozen=True)
class QAItem:
    id: str
    question: str
    answers: tuple[QAAnswer, ...]
    inference_type: str
    annotator_id: str


@dataclass(frozen=True)
class PassagePair:
    id: str
    passage_a: Passage
    passage_b: Passage
    qas: tuple[QAItem, ...]

    def passage(self, index: int) -> Passage:
        if index == 0:
            return self.passage_a
        if index == 1:
            return self.passage_b
        raise IndexError(index)


@dataclass(frozen=True)
class ParallelQADataset:
    version: str
    pairs: tuple[PassagePair, ...]


# --------------------------------------------------------------------------
# analysis view shared by diagnostics and evaluation


@dataclass(frozen=True)
class AnswerSpan:
    """Gold answer; ``char_start`` is None when the offset is unknown/unreliable."""

    text: str
    passage_index: int
    char_start: int | None


@dataclass(frozen=True)
class QAExample:
    qa_id: str
    question: str
    passages: tuple[str, ...]
    answers: tuple[AnswerSpan, ...]


@dataclass(frozen=True)
class Dataset:
    name: str
    items: tuple[QAExample, ...]


def to_examples(ds: ParallelQADataset, name: str = "pqa") -> Dataset:
    items = []
    for pair in ds.pairs:
        passages = (pair.passage_a.text, pair.passage_b.text)
        for qa in pair.qas:
            answers = tuple(
                AnswerSpan(a.text, a.passage_index, a.char_start) for a in qa.answers
            )
            items.append(QAExample(qa.id, qa.question, passages, answers))
    return Dataset(name=name, items=tuple(items))


# --------------------------------------------------------------------------
# validation


def validate_annotation(pair: PassagePair, qa: QAItem) -> list[str]:
    """Check one QA item against its pair; returns violations, never raises."""
    violations = []
    if not qa.id:
        violations.append("empty qa id")
    question = qa.question.strip()
    if not question:
        violations.append("empty question")
    elif not question.endswith("?"):
        violations.append("question must end with ?")
    if not qa.annotator_id:
        violations.append("empty annotator_id")
    if qa.inference_type not in INFERENCE_TYPES:
        violations.append(f"unknown inference_type {qa.inference_type!r}")
    if not qa.answers:
        violations.append("at least one answer required")
    for i, ans in enumerate(qa.answers):
        if ans.passage_index not in (0, 1):
            violations.append(f"answer {i}: passage_index must be 0 or 1")
            continue
        if not ans.text:
            violations.append(f"answer {i}: empty answer text")
            continue
        passage = pair.passage(ans.passage_index)
        if ans.char_start < 0 or passage.text[ans.char_start : ans.char_start + len(ans.text)] != ans.text:
            violations.append(f"answer {i}: span mismatch")
        if len(tokenize(ans.text).tokens) > MAX_ANSWER_TOKENS:
            violations.append(f"answer {i}: answer longer than {MAX_ANSWER_TOKENS} tokens")
    return violations


def validate_dataset(ds: ParallelQADataset) -> list[str]:
    violations = []
    if ds.version != SCHEMA_VERSION:
        violations.append(f"unsupported version {ds.version!r}")
    pair_ids: set[str] = set()
    qa_ids: set[str] = set()
    for pair in ds.pairs:
        if not pair.id:
            violations.append("empty pair id")
        elif pair.id in pair_ids:
            violations.append(f"duplicate pair id {pair.id!r}")
        pair_ids.add(pair.id)
        for p, label in ((pair.passage_a, "passage_a"), (pair.passage_b, "passage_b")):
            if p.source_kind not in SOURCE_KINDS:
                violations.append(f"pair {pair.id}: {label} has unknown source_kind {p.source_kind!r}")
            if not p.text:
                violations.append(f"pair {pair.id}: {label} has empty text")
        if pair.passage_a.origin_id == pair.passage_b.origin_id:
            violations.append(f"pair {pair.id}: passages share origin_id")
        for qa in pair.qas:
            if qa.id in qa_ids:
                violations.append(f"duplicate qa id {qa.id!r}")
            qa_ids.add(qa.id)
            violations.extend(f"qa {qa.id}: {v}" for v in validate_annotation(pair, qa))
    return violations


# --------------------------------------------------------------------------
# pqa-1 serialization


def _qa_to_dict(qa: QAItem) -> dict:
    return {
        "id": qa.id,
        "question": qa.question,
        "answers": [
            {"text": a.text, "passage_index": a.passage_index, "char_start": a.char_start}
            for a in qa.answers
        ],
        "inference_type": qa.inference_type,
        "annotator_id": qa.annotator_id,
    }


def _qa_from_dict(obj: dict, path: str) -> QAItem:
    try:
        answers = tuple(
            QAAnswer(text=a["text"], passage_index=int(a["passage_index"]), char_start=int(a["char_start"]))
            for a in obj["answers"]
        )
        return QAItem(
            id=obj["id"],
            question=obj["question"],
            answers=answers,
            inference_type=obj["inference_type"],
            annotator_id=obj["annotator_id"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetError(f"{path}: malformed qa record ({exc})") from exc


def dataset_to_dict(ds: ParallelQADataset) -> dict:
    return {
        "version": ds.version,
        "pairs": [
            {
                "id": pair.id,
                "passage_a": vars(pair.passage_a).copy(),
                "passage_b": vars(pair.passage_b).copy(),
                "qas": [_qa_to_dict(qa) for qa in pair.qas],
            }
            for pair in ds.pairs
        ],
    }


def dataset_from_dict(obj: dict, origin: str = "<memory>") -> ParallelQADataset:
    if not isinstance(obj, dict):
        raise DatasetError(f"{origin}: top level must be an object")
    try:
        version = obj["version"]
        raw_pairs = obj["pairs"]
    except KeyError as exc:
        raise DatasetError(f"{origin}: missing top-level key {exc.args[0]!r}") from exc
    pairs = []
    for i, rp in enumerate(raw_pairs):
        path = f"{origin}: pairs[{i}]"
        try:
            pa = Passage(**rp["passage_a"])
            pb = Passage(**rp["passage_b"])
            qas = tuple(_qa_from_dict(q, f"{path}.qas[{j}]") for j, q in enumerate(rp["qas"]))
            pairs.append(PassagePair(id=rp["id"], passage_a=pa, passage_b=pb, qas=qas))
        except (KeyError, TypeError) as exc:
            raise DatasetError(f"{path}: malformed pair ({exc})") from exc
    ds = ParallelQADataset(version=version, pairs=tuple(pairs))
    violations = validate_dataset(ds)
    if violations:
        raise DatasetError(f"{origin}: " + "; ".join(violations))
    return ds


def dumps_pqa(ds: ParallelQADataset) -> str:
    return json.dumps(dataset_to_dict(ds), indent=2, ensure_ascii=False, sort_keys=True)


def save_pqa(ds: ParallelQADataset, path: str | Path) -> None:
    Path(path).write_text(dumps_pqa(ds) + "\n", encoding="utf-8")


def load_pqa(path: str | Path) -> ParallelQADataset:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON ({exc})") from exc
    return dataset_from_dict(obj, origin=str(path))


def load_pilot_dataset() -> ParallelQADataset:
    """The dataset of example pairs bundled with the package."""
    from ._assets import asset_text

    return dataset_from_dict(json.loads(asset_text("pilot_dataset.json")), origin="pilot_dataset.json")


# --------------------------------------------------------------------------
# SQuAD v1.1 (read-only input format)


def load_squad(path: str | Path) -> tuple[Dataset, list[str]]:
    """Load a SQuAD v1.1 file into the single-passage view.

    Answer offsets are validated against the context; offsets within
    ±5 characters of a verbatim occurrence are repaired (warning recorded),
    anything else is kept with an unknown offset and flagged.
    """
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON ({exc})") from exc

    warnings: list[str] = []
    items: list[QAExample] = []

    def need(mapping, key, where):
        if not isinstance(mapping, dict) or key not in mapping:
            raise DatasetError(f"{path}: missing {where}.{key}")
        return mapping[key]

    for ai, article in enumerate(need(obj, "data", "$")):
        for pi, para in enumerate(need(article, "paragraphs", f"data[{ai}]")):
            where = f"data[{ai}].paragraphs[{pi}]"
            context = need(para, "context", where)
            if not isinstance(context, str) or not context:
                raise DatasetError(f"{path}: {where}.context must be a nonempty string")
            for qi, qa in enumerate(need(para, "qas", where)):
                qwhere = f"{where}.qas[{qi}]"
                qa_id = str(need(qa, "id", qwhere))
                question = need(qa, "question", qwhere)
                answers = []
                for answ in need(qa, "answers", qwhere):
                    text = need(answ, "text", f"{qwhere}.answers")
                    start = int(need(answ, "answer_start", f"{qwhere}.answers"))
                    answers.append(_check_offset(context, text, start, qa_id, warnings))
                items.append(
                    QAExample(
                        qa_id=qa_id,
                        question=question,
                        passages=(context,),
                        answers=tuple(answers),
                    )
                )
    return Dataset(name=path.stem, items=tuple(items)), warnings


def _check_offset(context: str, text: str, start: int, qa_id: str, warnings: list[str]) -> AnswerSpan:
    if context[start : start + len(text)] == text:
        return AnswerSpan(text, 0, start)
    # Nearest verbatim occurrence within the repair window.
    best = None
    pos = context.find(text)
    while pos != -1:
        if best is None or abs(pos - start) < abs(best - start):
            best = pos
        pos = context.find(text, pos + 1)
    if best is not None and abs(best - start) <= OFFSET_REPAIR_WINDOW:
        warnings.append(f"{qa_id}: answer_start {start} repaired to {best}")
        return AnswerSpan(text, 0, best)
    if best is None:
        warnings.append(f"{qa_id}: answer text not found in context; item flagged")
    else:
        warnings.append(f"{qa_id}: answer_start {start} off by more than {OFFSET_REPAIR_WINDOW}; offset dropped")
    return AnswerSpan(text, 0, None)


def load_dataset(path: str | Path, fmt: str = "auto") -> tuple[Dataset, list[str]]:
    """Load either format into the analysis view; ``fmt`` 'auto' sniffs the file."""
    path = Path(path)
    if fmt == "auto":
        try:
            head = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{path}: invalid JSON ({exc})") from exc
        fmt = "squad" if isinstance(head, dict) and "data" in head else "pqa"
    if fmt == "squad":
        return load_squad(path)
    if fmt == "pqa":
        ds = load_pqa(path)
        return to_examples(ds, name=path.stem), []
    raise DatasetError(f"unknown dataset format {fmt!r}")


# --------------------------------------------------------------------------
# dataset statistics


@dataclass(frozen=True)
class DatasetStats:
    num_pairs: int
    num_qas: int
    mean_answer_len_tokens: float
    named_entity_answer_rate: float
    answers_per_passage_index: dict[int, int]


def _looks_named_entity(answer_text: str) -> bool:
    # Heuristic only: at least half the tokens capitalized or numeric.
    toks = tokenize(answer_text).tokens
    if not toks:
        return False
    strong = sum(1 for t in toks if t.surface[0].isupper() or t.surface.isdigit())
    return 2 * strong >= len(toks)


def compute_stats(ds: ParallelQADataset) -> DatasetStats:
    answers: list[QAAnswer] = []
    num_qas = 0
    per_index = {0: 0, 1: 0}
    for pair in ds.pairs:
        for qa in pair.qas:
            num_qas += 1
            for ans in qa.answers:
                answers.append(ans)
                per_index[ans.passage_index] += 1
    if not answers:
        raise ValueError("empty dataset")
    lengths = [len(tokenize(a.text).tokens) for a in answers]
    ne = sum(1 for a in answers if _looks_named_entity(a.text))
    return DatasetStats(
        num_pairs=len(ds.pairs),
        num_qas=num_qas,
        mean_answer_len_tokens=sum(lengths) / len(lengths),
        named_entity_answer_rate=ne / len(answers),
        answers_per_passage_index=per_index,
    )


def stats_to_dict(stats: DatasetStats) -> dict:
    return {
        "num_pairs": stats.num_pairs,
        "num_qas": stats.num_qas,
        "mean_answer_len_tokens": stats.mean_answer_len_tokens,
        "named_entity_answer_rate": stats.named_entity_answer_rate,
        "named_entity_rate_note": "capitalization heuristic, approximate",
        "answers_per_passage_index": {str(k): v for k, v in sorted(stats.answers_per_passage_index.items())},
    }


# --------------------------------------------------------------------------
# journal-backed annotation store


@dataclass(frozen=True)
class Receipt:
    seq: int
    pair_id: str
    qa_id: str


class AnnotationStore:
    """Append-only store: a base dataset plus a JSON-lines journal.

    Every accepted annotation is written, flushed, and fsynced before the
    receipt is returned, so an acknowledged record survives any crash. A
    partial trailing line (torn write) is skipped on replay; corruption
    anywhere else raises.
    """

    def __init__(self, root: str | Path, dataset: ParallelQADataset | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._dataset_path = self.root / "dataset.json"
        if self._dataset_path.exists():
            self._base = load_pqa(self._dataset_path)
        elif dataset is not None:
            save_pqa(dataset, self._dataset_path)
            self._base = dataset
        else:
            raise DatasetError(f"store {self.root} has no dataset.json and none was provided")

        self._pairs: dict[str, PassagePair] = {p.id: p for p in self._base.pairs}
        self._qa_ids: set[str] = {qa.id for p in self._base.pairs for qa in p.qas}
        self._extra: dict[str, list[QAItem]] = {pid: [] for pid in self._pairs}
        self._seq = 0
        self._lock = threading.Lock()

        self.journal_path = self.root / "journal.jsonl"
        self._replay()
        self._journal = open(self.journal_path, "a", encoding="utf-8")

    def _replay(self) -> None:
        if not self.journal_path.exists():
            return
        raw = self.journal_path.read_bytes()
        if not raw:
            return
        # The chunk after the last newline is a torn final write: drop it and
        # trim the file, or the next append would fuse with the partial line.
        durable = raw.rfind(b"\n") + 1
        if durable < len(raw):
            with open(self.journal_path, "r+b") as f:
                f.truncate(durable)
        complete = raw[:durable].split(b"\n")[:-1]
        for i, line in enumerate(complete):
            if not line.strip():
                continue
            try:
                rec = json.loads(line.decode("utf-8"))
                qa = _qa_from_dict(rec["qa"], f"{self.journal_path}:{i + 1}")
                pair_id = rec["pair_id"]
                seq = int(rec["seq"])
            except (json.JSONDecodeError, UnicodeDecodeError, KeyError, TypeError, ValueError, DatasetError) as exc:
                raise DatasetError(f"{self.journal_path}: corrupt record at line {i + 1} ({exc})") from exc
            self._seq = max(self._seq, seq)
            if qa.id in self._qa_ids:
                continue  # duplicate from a retried write; replay keeps the first
            if pair_id not in self._pairs:
                raise DatasetError(f"{self.journal_path}: line {i + 1} references unknown pair {pair_id!r}")
            self._qa_ids.add(qa.id)
            self._extra[pair_id].append(qa)

    def close(self) -> None:
        self._journal.close()

    # -- reads -------------------------------------------------------------

    def pair_ids(self) -> list[str]:
        return sorted(self._pairs)

    def get_pair(self, pair_id: str) -> PassagePair:
        if pair_id not in self._pairs:
            raise UnknownPairError(pair_id)
        base = self._pairs[pair_id]
        return replace(base, qas=base.qas + tuple(self._extra[pair_id]))

    def annotation_count(self, pair_id: str) -> int:
        base = self._pairs[pair_id]
        return len(base.qas) + len(self._extra[pair_id])

    def dataset(self) -> ParallelQADataset:
        pairs = tuple(self.get_pair(pid) for pid in sorted(self._pairs))
        return ParallelQADataset(version=SCHEMA_VERSION, pairs=pairs)

    def num_qas(self) -> int:
        return sum(self.annotation_count(pid) for pid in self._pairs)

    # -- writes ------------------------------------------------------------

    def append_annotation(self, pair_id: str, qa: QAItem) -> Receipt:
        with self._lock:
            if pair_id not in self._pairs:
                raise UnknownPairError(pair_id)
            violations = validate_annotation(self.get_pair(pair_id), qa)
            if qa.id in self._qa_ids:
                violations.append("duplicate id")
            if violations:
                raise AnnotationRejected(violations)
            seq = self._seq + 1
            record = {"seq": seq, "pair_id": pair_id, "qa": _qa_to_dict(qa)}
            self._journal.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
            self._journal.flush()
            os.fsync(self._journal.fileno())
            # Only after the record is durable does the in-memory state change.
            self._seq = seq
            self._qa_ids.add(qa.id)
            self._extra[pair_id].append(qa)
            return Receipt(seq=seq, pair_id=pair_id, qa_id=qa.id)
