"""HTTP API feeding passage pairs to annotators and exposing exports/reports.

All mutations funnel through the journal-backed store's serialized writer;
reads see the store state as of the last acknowledged write. Report payloads
are rendered by the same functions the CLI uses, byte for byte.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import diagnostics, evaluation
from .._assets import asset_text
from ..datastore import (
    AnnotationRejected,
    AnnotationStore,
    QAAnswer,
    QAItem,
    UnknownPairError,
    compute_stats,
    dumps_pqa,
    stats_to_dict,
    to_examples,
)
from . import schemas

INFERENCE_TYPE_GUIDE = [
    ("referential", "Work out which entity a name, noun phrase, or pronoun points to.",
     "'the record holder' refers to the athlete named in the other passage"),
    ("figurative", "Interpret a metaphor or other non-literal phrasing.",
     "'the team cruised to victory' means they won easily"),
    ("part_whole", "Use inclusion or membership between concepts.",
     "a terrier is a dog, so counting dogs includes terriers"),
    ("numeric", "Convert units or do simple arithmetic.",
     "a fortnight covers 14 days"),
    ("lexical", "Pick a word's meaning from its context.",
     "'bank' as riverbank versus financial institution"),
    ("denotation", "Know what an expression conventionally stands for.",
     "a white flag stands for surrender"),
    ("spatial", "Reason about locations and containment in space.",
     "a city inside a country is inside that country's continent"),
    ("temporal", "Reason about order or duration in time.",
     "an event in 1994 happened before one in 1997"),
]


@dataclass
class SessionState:
    annotator_id: str
    assigned: deque[str] = dataclass_field(default_factory=deque)
    completed: set[str] = dataclass_field(default_factory=set)

    def seen(self) -> set[str]:
        return set(self.assigned) | self.completed

    def mark_completed(self, pair_id: str) -> None:
        if pair_id in self.assigned:
            self.assigned.remove(pair_id)
        self.completed.add(pair_id)


def _json_error(status: int, violations: list[str]) -> JSONResponse:
    return JSONResponse(status_code=status, content={"violations": violations})


def create_app(store: AnnotationStore, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="parallelqa annotation service", version="0.1.0")
    sessions: dict[str, SessionState] = {}
    guidelines = asset_text("guidelines.md")
    taxonomy = [
        schemas.InferenceTypeInfo(name=n, description=d, example=e)
        for n, d, e in INFERENCE_TYPE_GUIDE
    ]

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        violations = []
        for err in exc.errors():
            loc = [str(p) for p in err.get("loc", []) if p not in ("body",)]
            field = ".".join(loc) or "body"
            if err.get("type") == "missing":
                violations.append(f"missing field {loc[-1] if loc else field}")
            else:
                violations.append(f"{field}: {err.get('msg', 'invalid')}")
        return _json_error(422, violations)

    @app.get("/api/pairs/next", response_model=schemas.NextPairResponse, responses={204: {}})
    def next_pair(annotator: str = Query(min_length=1)):
        session = sessions.setdefault(annotator, SessionState(annotator_id=annotator))
        seen = session.seen()
        open_ids = [pid for pid in store.pair_ids() if pid not in seen]
        if not open_ids:
            return Response(status_code=204)
        pair_id = min(open_ids, key=lambda pid: (store.annotation_count(pid), pid))
        session.assigned.append(pair_id)
        pair = store.get_pair(pair_id)
        return schemas.NextPairResponse(
            pair=schemas.PairModel.model_validate(
                {
                    "id": pair.id,
                    "passage_a": vars(pair.passage_a),
                    "passage_b": vars(pair.passage_b),
                    "qas": [
                        {
                            "id": qa.id,
                            "question": qa.question,
                            "answers": [vars(a) for a in qa.answers],
                            "inference_type": qa.inference_type,
                            "annotator_id": qa.annotator_id,
                        }
                        for qa in pair.qas
                    ],
                }
            ),
            guidelines=guidelines,
            inference_types=taxonomy,
            pairs_remaining=len(open_ids),
        )

    @app.post("/api/annotations", response_model=schemas.AnnotationReceipt, status_code=201)
    def post_annotation(body: schemas.AnnotationRequest):
        qa = QAItem(
            id=body.qa.id,
            question=body.qa.question,
            answers=tuple(
                QAAnswer(text=a.text, passage_index=a.passage_index, char_start=a.char_start)
                for a in body.qa.answers
            ),
            inference_type=body.qa.inference_type,
            annotator_id=body.qa.annotator_id,
        )
        try:
            receipt = store.append_annotation(body.pair_id, qa)
        except UnknownPairError:
            return _json_error(404, [f"unknown pair {body.pair_id!r}"])
        except AnnotationRejected as exc:
            return _json_error(422, exc.violations)
        session = sessions.setdefault(qa.annotator_id, SessionState(annotator_id=qa.annotator_id))
        session.mark_completed(body.pair_id)
        return schemas.AnnotationReceipt(seq=receipt.seq, pair_id=receipt.pair_id, qa_id=receipt.qa_id)

    @app.get("/api/export")
    def export():
        dataset = store.dataset()
        if not dataset.pairs:
            return _json_error(409, ["store is empty"])
        return Response(content=dumps_pqa(dataset), media_type="application/json")

    @app.get("/api/reports/retrieval", response_model=schemas.RetrievalReportModel)
    def retrieval_report(metric: schemas.MetricName = "jaccard"):
        if store.num_qas() == 0:
            return _json_error(409, ["store has no annotations"])
        examples = to_examples(store.dataset())
        report = diagnostics.retrieval_rate(examples, metric)
        return Response(
            content=diagnostics.render_report_json([report]),
            media_type="application/json",
        )

    @app.post("/api/reports/eval", response_model=schemas.EvalReportModel)
    def eval_report(body: schemas.EvalRequest):
        if store.num_qas() == 0:
            return _json_error(409, ["store has no annotations"])
        examples = to_examples(store.dataset())
        report = evaluation.evaluate(examples, body.predictions)
        categories = evaluation.categorize_errors(examples, body.predictions, metric=body.metric)
        report = evaluation.with_categories(report, categories)
        return Response(
            content=evaluation.render_report_json(report),
            media_type="application/json",
        )

    @app.get("/api/reports/stats", response_model=schemas.DatasetStatsModel)
    def dataset_stats():
        if store.num_qas() == 0:
            return _json_error(409, ["store has no annotations"])
        stats = compute_stats(store.dataset())
        return JSONResponse(content=stats_to_dict(stats))

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
