"""Domain types shared across the package and annotation-graph validation."""

from __future__ import annotations

import dataclasses
import enum
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Optional, Union


class AnnotationKind(enum.Enum):
    COMMENT = "comment"
    NOTE = "note"
    HELP = "help"
    INSERT = "insert"
    PARAGRAPH = "paragraph"
    HIGHLIGHT = "highlight"
    UNDERLINE = "underline"
    UNKNOWN = "unknown"

    @classmethod
    def parse(cls, value: str) -> "AnnotationKind":
        """Map a free-form type name onto a kind; anything unrecognised is UNKNOWN."""
        try:
            return cls(value.strip().lower())
        except ValueError:
            return cls.UNKNOWN


# highlights and underlines carry a quoted span rather than a free comment
MARK_KINDS = frozenset({AnnotationKind.HIGHLIGHT, AnnotationKind.UNDERLINE})


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    file_name: str
    title: Optional[str] = None
    author: Optional[str] = None
    keywords: Optional[tuple[str, ...]] = None
    summary: Optional[str] = None
    created_at: Optional[datetime] = None

    def __post_init__(self):
        if not self.file_name:
            raise ValueError("file_name must be non-empty")


@dataclass(frozen=True)
class OnDocument:
    doc_id: str
    page_index: int = 0


@dataclass(frozen=True)
class OnAnnotation:
    parent_id: str


AnnotationTarget = Union[OnDocument, OnAnnotation]


@dataclass(frozen=True)
class Annotation:
    annotation_id: str
    author_id: str
    kind: AnnotationKind
    body: str
    target: AnnotationTarget
    created_at: datetime
    # for meta-annotations this is the root ancestor's document; None until resolved
    doc_id: Optional[str] = None

    def __post_init__(self):
        if self.doc_id is None and isinstance(self.target, OnDocument):
            object.__setattr__(self, "doc_id", self.target.doc_id)

    @property
    def parent_id(self) -> Optional[str]:
        if isinstance(self.target, OnAnnotation):
            return self.target.parent_id
        return None

    @property
    def is_meta(self) -> bool:
        return isinstance(self.target, OnAnnotation)


@dataclass(frozen=True, order=True)
class Violation:
    kind: str  # MissingParent | Cycle | DuplicateId | DocMismatch
    ids: tuple[str, ...]
    detail: str = field(default="", compare=False)


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken to be UTC."""
    text = text.strip()
    if text.endswith("Z") or text.endswith("z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _walk_parents(start: str, parents: dict[str, Optional[str]]):
    """Yield the ancestors of ``start``; stops at a root, a missing id, or a repeat."""
    seen = {start}
    node = parents.get(start)
    while node is not None and node in parents and node not in seen:
        yield node
        seen.add(node)
        node = parents[node]


def validate_graph(annotations: Iterable[Annotation]) -> list[Violation]:
    """Check id uniqueness, parent resolution, acyclicity and document consistency.

    Returns a sorted list of violations, empty when the graph is valid. The
    result does not depend on the order of ``annotations``.
    """
    annotations = list(annotations)
    counts = Counter(a.annotation_id for a in annotations)
    violations: set[Violation] = set()

    for ann_id, n in counts.items():
        if n > 1:
            violations.add(Violation("DuplicateId", (ann_id,), f"{n} occurrences"))

    # duplicated ids have no single well-defined parent; skip them structurally
    unique = {a.annotation_id: a for a in annotations if counts[a.annotation_id] == 1}
    parents = {i: a.parent_id for i, a in unique.items()}

    for ann_id, parent in parents.items():
        if parent is not None and parent not in counts:
            violations.add(Violation("MissingParent", (ann_id,), f"parent {parent!r} not found"))

    # each node has at most one parent, so every cycle is a simple loop
    on_cycle: set[str] = set()
    for ann_id in sorted(parents):
        if ann_id in on_cycle:
            continue
        path: list[str] = []
        index: dict[str, int] = {}
        node: Optional[str] = ann_id
        while node is not None and node in parents and node not in index:
            if node in on_cycle:
                break
            index[node] = len(path)
            path.append(node)
            node = parents[node]
        if node is not None and node in index:
            loop = tuple(sorted(path[index[node]:]))
            on_cycle.update(loop)
            violations.add(Violation("Cycle", loop))

    for ann_id, ann in unique.items():
        if ann_id in on_cycle or ann.doc_id is None:
            continue
        root_doc = _root_document(ann_id, unique, parents)
        if root_doc is not None and root_doc != ann.doc_id:
            violations.add(
                Violation("DocMismatch", (ann_id,), f"declared {ann.doc_id!r}, root is {root_doc!r}")
            )

    return sorted(violations)


def _root_document(ann_id: str, by_id: dict[str, Annotation], parents) -> Optional[str]:
    node = ann_id
    for node in _walk_parents(ann_id, parents):
        pass
    target = by_id[node].target
    if isinstance(target, OnDocument):
        return target.doc_id
    return None


def resolve_doc_ids(annotations: Iterable[Annotation]) -> list[Annotation]:
    """Fill in ``doc_id`` for meta-annotations from their root ancestor.

    Assumes a graph that passed :func:`validate_graph`.
    """
    annotations = list(annotations)
    by_id = {a.annotation_id: a for a in annotations}
    parents = {i: a.parent_id for i, a in by_id.items()}
    out = []
    for a in annotations:
        if a.doc_id is None:
            a = dataclasses.replace(a, doc_id=_root_document(a.annotation_id, by_id, parents))
        out.append(a)
    return out


def topological_order(annotations: Iterable[Annotation]) -> list[Annotation]:
    """Order annotations so that every parent precedes its children.

    Ties are broken by annotation id, which makes the result deterministic.
    """
    by_id = {a.annotation_id: a for a in annotations}
    children: dict[Optional[str], list[str]] = {}
    for a in by_id.values():
        key = a.parent_id if a.parent_id in by_id else None
        children.setdefault(key, []).append(a.annotation_id)
    out = []
    frontier = sorted(children.get(None, []))
    while frontier:
        nxt = []
        for ann_id in frontier:
            out.append(by_id[ann_id])
            nxt.extend(children.get(ann_id, []))
        frontier = sorted(nxt)
    return out
