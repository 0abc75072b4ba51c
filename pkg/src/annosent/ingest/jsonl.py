"""JSON-lines annotation format.

Each line is one object. Annotation lines look like::

    {"id": "ann1", "author": "A", "kind": "comment", "body": "...",
     "target": {"type": "document", "ref": "P1", "page": 0},
     "created_at": "2012-01-01T00:00:00Z", "doc": "P1"}

Meta-annotations use ``{"type": "annotation", "ref": "<parent id>"}`` and may
omit ``doc``. A line with ``"record": "document"`` declares document metadata.
Store dumps add ``relation``, ``word``, ``score`` and ``sentiment`` records;
ingestion skips those with a warning.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from annosent.errors import MalformedLine, SchemaViolation
from annosent.ingest.report import IngestReport, finalize
from annosent.model import (
    Annotation,
    AnnotationKind,
    DocumentRecord,
    OnAnnotation,
    OnDocument,
    format_timestamp,
    parse_timestamp,
)


def document_to_dict(doc: DocumentRecord) -> dict:
    out: dict[str, Any] = {"record": "document", "id": doc.doc_id, "file_name": doc.file_name}
    for name in ("title", "author", "summary"):
        value = getattr(doc, name)
        if value is not None:
            out[name] = value
    if doc.keywords is not None:
        out["keywords"] = list(doc.keywords)
    if doc.created_at is not None:
        out["created_at"] = format_timestamp(doc.created_at)
    return out


def document_from_dict(data: Mapping) -> DocumentRecord:
    try:
        created = data.get("created_at")
        keywords = data.get("keywords")
        return DocumentRecord(
            doc_id=str(data["id"]),
            file_name=str(data["file_name"]),
            title=data.get("title"),
            author=data.get("author"),
            keywords=tuple(keywords) if keywords is not None else None,
            summary=data.get("summary"),
            created_at=parse_timestamp(created) if created else None,
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SchemaViolation(f"bad document record: {exc}") from None


def annotation_to_dict(ann: Annotation) -> dict:
    if isinstance(ann.target, OnDocument):
        target = {"type": "document", "ref": ann.target.doc_id, "page": ann.target.page_index}
    else:
        target = {"type": "annotation", "ref": ann.target.parent_id}
    out = {
        "id": ann.annotation_id,
        "author": ann.author_id,
        "kind": ann.kind.value,
        "body": ann.body,
        "target": target,
        "created_at": format_timestamp(ann.created_at),
    }
    if ann.doc_id is not None:
        out["doc"] = ann.doc_id
    return out


def annotation_from_dict(data: Mapping) -> Annotation:
    try:
        target = data["target"]
        if target["type"] == "document":
            page = int(target.get("page", 0))
            if page < 0:
                raise ValueError(f"negative page index {page}")
            tgt = OnDocument(str(target["ref"]), page)
        elif target["type"] == "annotation":
            tgt = OnAnnotation(str(target["ref"]))
        else:
            raise ValueError(f"unknown target type {target['type']!r}")
        doc = data.get("doc")
        return Annotation(
            annotation_id=str(data["id"]),
            author_id=str(data["author"]),
            kind=AnnotationKind.parse(str(data["kind"])),
            body=str(data.get("body", "")),
            target=tgt,
            created_at=parse_timestamp(data["created_at"]),
            doc_id=str(doc) if doc is not None else None,
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SchemaViolation(f"bad annotation record: {exc!r}") from None


def iter_records(data: bytes):
    """Yield ``(line_no, record_type, obj)`` for each non-blank line."""
    for line_no, line in enumerate(data.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise MalformedLine(line_no, "expected a JSON object")
        yield line_no, obj.get("record", "annotation"), obj


def parse_jsonl(data: bytes):
    report = IngestReport()
    for line_no, kind, obj in iter_records(data):
        if kind == "document":
            report.documents.append(document_from_dict(obj))
        elif kind == "annotation":
            report.annotations.append(annotation_from_dict(obj))
        else:
            report.warnings.append(f"line {line_no}: skipped {kind!r} record")
    return finalize(report)


def dumps_line(obj: Mapping) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def write_jsonl(report) -> bytes:
    lines = [dumps_line(document_to_dict(d)) for d in sorted(report.documents, key=lambda d: d.doc_id)]
    lines += [
        dumps_line(annotation_to_dict(a))
        for a in sorted(report.annotations, key=lambda a: a.annotation_id)
    ]
    return "".join(line + "\n" for line in lines).encode("utf-8")

