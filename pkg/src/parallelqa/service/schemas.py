"""Pydantic request/response models for the annotation service API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

SourceKind = Literal["news", "wiki", "other"]
InferenceType = Literal[
    "referential",
    "figurative",
    "part_whole",
    "numeric",
    "lexical",
    "denotation",
    "spatial",
    "temporal",
]
MetricName = Literal["jaccard", "tfidf", "bm25"]


class PassageModel(BaseModel):
    source_kind: SourceKind
    origin_id: str
    text: str


class AnswerModel(BaseModel):
    text: str
    passage_index: int = Field(ge=0, le=1)
    char_start: int = Field(ge=0)


class QAModel(BaseModel):
    id: str
    question: str
    answers: list[AnswerModel] = Field(min_length=1)
    inference_type: InferenceType
    annotator_id: str


class PairModel(BaseModel):
    id: str
    passage_a: PassageModel
    passage_b: PassageModel
    qas: list[QAModel]


class InferenceTypeInfo(BaseModel):
    name: str
    description: str
    example: str


class NextPairResponse(BaseModel):
    pair: PairModel
    guidelines: str
    inference_types: list[InferenceTypeInfo]
    pairs_remaining: int


class AnnotationRequest(BaseModel):
    pair_id: str
    qa: QAModel


class AnnotationReceipt(BaseModel):
    seq: int
    pair_id: str
    qa_id: str


class ViolationsResponse(BaseModel):
    violations: list[str]


class RetrievalItemModel(BaseModel):
    qa_id: str
    top_sentence_index: int
    hit: bool


class RetrievalReportModel(BaseModel):
    metric: MetricName
    total: int
    hits: int
    rate: float
    per_item: list[RetrievalItemModel]


class EvalItemModel(BaseModel):
    qa_id: str
    em: int
    f1: float
    category: Optional[str] = None


class EvalReportModel(BaseModel):
    total: int
    em: float
    f1: float
    missing: list[str]
    per_item: list[EvalItemModel]


class EvalRequest(BaseModel):
    predictions: dict[str, str]
    metric: MetricName = "jaccard"


class DatasetStatsModel(BaseModel):
    num_pairs: int
    num_qas: int
    mean_answer_len_tokens: float
    named_entity_answer_rate: float
    named_entity_rate_note: str
    answers_per_passage_index: dict[str, int]
