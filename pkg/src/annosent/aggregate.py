"""Annotation counting and the weighted collective sentiment of a document."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from annosent.errors import MissingScore, UnknownDocument
from annosent.model import MARK_KINDS, Annotation, AnnotationKind, resolve_doc_ids
from annosent.scoring import AnnotationScore

DEFAULT_EPSILON = 1e-9
CONTRADICTS_PARENT = "contradicts parent"

TEXT_KINDS = frozenset({AnnotationKind.COMMENT, AnnotationKind.NOTE})


class Mode(enum.Enum):
    LITERAL = "literal"
    ADJUSTED = "adjusted"


class Verdict(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    OBJECTIVE = "Objective"


@dataclass(frozen=True)
class AnnotationCounts:
    per_kind: dict = field(default_factory=dict)  # AnnotationKind -> int

    @property
    def total(self) -> int:
        return sum(self.per_kind.values())

    def __getitem__(self, kind: AnnotationKind) -> int:
        return self.per_kind.get(kind, 0)

    def to_dict(self) -> dict:
        out = {k.value: self[k] for k in AnnotationKind}
        out["total"] = self.total
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "AnnotationCounts":
        return cls({k: int(data.get(k.value, 0)) for k in AnnotationKind})


@dataclass(frozen=True)
class WeightedTerm:
    annotation_id: str
    score: float
    meta_count: int
    weight: float
    excluded: bool = False
    exclusion_reason: Optional[str] = None
    parent_id: Optional[str] = None


@dataclass(frozen=True)
class DocumentSentiment:
    doc_id: str
    counts: AnnotationCounts
    terms: tuple[WeightedTerm, ...]
    weighted_score: float
    verdict: Verdict
    mode: Mode
    epsilon: float

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "counts": self.counts.to_dict(),
            "terms": [
                {
                    "annotation_id": t.annotation_id,
                    "score": t.score,
                    "meta_count": t.meta_count,
                    "weight": t.weight,
                    "excluded": t.excluded,
                    "exclusion_reason": t.exclusion_reason,
                    "parent_id": t.parent_id,
                }
                for t in self.terms
            ],
            "weighted_score": self.weighted_score,
            "verdict": self.verdict.value,
            "mode": self.mode.value,
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "DocumentSentiment":
        return cls(
            doc_id=data["doc_id"],
            counts=AnnotationCounts.from_dict(data["counts"]),
            terms=tuple(WeightedTerm(**t) for t in data["terms"]),
            weighted_score=data["weighted_score"],
            verdict=Verdict(data["verdict"]),
            mode=Mode(data["mode"]),
            epsilon=data["epsilon"],
        )


def classify(weighted_score: float, epsilon: float = DEFAULT_EPSILON) -> Verdict:
    if weighted_score > epsilon:
        return Verdict.POSITIVE
    if weighted_score < -epsilon:
        return Verdict.NEGATIVE
    return Verdict.OBJECTIVE


def _on_document(annotations, doc_id, documents) -> list[Annotation]:
    if documents is not None and doc_id not in set(documents):
        raise UnknownDocument(f"unknown document {doc_id!r}")
    return [a for a in resolve_doc_ids(annotations) if a.doc_id == doc_id]


def count_annotations(
    annotations: Iterable[Annotation], doc_id: str, documents: Optional[Iterable[str]] = None
) -> AnnotationCounts:
    """Bucket every annotation of ``doc_id`` (meta-annotations included) by kind.

    ``documents``, when given, is the set of known document ids; asking about
    any other id raises UnknownDocument.
    """
    tally = Counter(a.kind for a in _on_document(annotations, doc_id, documents))
    return AnnotationCounts({k: tally.get(k, 0) for k in AnnotationKind})


def is_scoreable(annotation: Annotation, score_spans: bool = False) -> bool:
    if annotation.kind in TEXT_KINDS:
        return True
    return score_spans and annotation.kind in MARK_KINDS


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def collective_sentiment(
    annotations: Iterable[Annotation],
    scores: Mapping[str, AnnotationScore],
    doc_id: str,
    mode: Mode = Mode.ADJUSTED,
    epsilon: float = DEFAULT_EPSILON,
    *,
    score_spans: bool = False,
    n_includes_marks: bool = False,
    documents: Optional[Iterable[str]] = None,
) -> DocumentSentiment:
    """Weighted aggregate of annotation scores on one document.

    A meta-annotation whose score has the opposite sign of its parent's score
    is excluded. Each remaining term is weighted by ``meta_count / N``
    (literal) or ``(1 + meta_count) / N`` (adjusted), where ``N`` is the
    number of scoreable annotations on the document. The sum is accumulated
    exactly and rounded once.
    """
    mode = Mode(mode)
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    on_doc = _on_document(annotations, doc_id, documents)
    tally = Counter(a.kind for a in on_doc)
    counts = AnnotationCounts({k: tally.get(k, 0) for k in AnnotationKind})

    scoreable = sorted(
        (a for a in on_doc if is_scoreable(a, score_spans)), key=lambda a: a.annotation_id
    )
    for a in scoreable:
        if a.annotation_id not in scores:
            raise MissingScore(a.annotation_id)

    n = len(scoreable)
    if n_includes_marks and not score_spans:
        n += sum(1 for a in on_doc if a.kind in MARK_KINDS)

    meta_counts = Counter(a.parent_id for a in on_doc if a.parent_id is not None)
    scoreable_ids = {a.annotation_id for a in scoreable}

    terms = []
    total = Fraction(0)
    for a in scoreable:
        value = scores[a.annotation_id].sentiment_score
        m = meta_counts.get(a.annotation_id, 0)
        weight = Fraction(m if mode is Mode.LITERAL else 1 + m, n)
        excluded = False
        parent = a.parent_id
        if parent is not None and parent in scoreable_ids:
            parent_value = scores[parent].sentiment_score
            excluded = _sign(value) * _sign(parent_value) < 0
        if not excluded:
            total += Fraction(value) * weight
        terms.append(
            WeightedTerm(
                annotation_id=a.annotation_id,
                score=value,
                meta_count=m,
                weight=float(weight),
                excluded=excluded,
                exclusion_reason=CONTRADICTS_PARENT if excluded else None,
                parent_id=parent,
            )
        )

    weighted = float(total)
    return DocumentSentiment(
        doc_id=doc_id,
        counts=counts,
        terms=tuple(terms),
        weighted_score=weighted,
        verdict=classify(weighted, epsilon),
        mode=mode,
        epsilon=epsilon,
    )
