"""Annotation XML (``Annotation_List`` documents) reader and writer.

Beyond the base schema this accepts two extensions: a ``page`` attribute on
``Annotation_on`` (0-based page index) and ``highlight``/``underline`` as
``Type`` values. ``Paper`` may carry optional document metadata attributes
(``title``, ``author``, ``summary``, ``created``, and ``keywords`` as a JSON
array) so that documents survive a round trip.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from importlib import resources
from typing import Optional

from annosent.errors import SchemaViolation, XmlSyntax
from annosent.ingest.report import IngestReport, finalize
from annosent.model import (
    MARK_KINDS,
    Annotation,
    AnnotationKind,
    DocumentRecord,
    OnAnnotation,
    OnDocument,
    format_timestamp,
    parse_timestamp,
)

ROOT = "Annotation_List"
DTD = resources.files("annosent.data").joinpath("annotations.dtd").read_text("utf-8")


def _child(elem: ET.Element, tag: str, where: str) -> ET.Element:
    found = elem.find(tag)
    if found is None:
        raise SchemaViolation(f"{where}: missing <{tag}>")
    return found


def _text(elem: ET.Element) -> str:
    return (elem.text or "").strip()


def _type_value(elem: ET.Element) -> str:
    # <Type>comment</Type> or the element-content form <Type><comment/></Type>
    text = _text(elem)
    if text:
        return text
    children = list(elem)
    if len(children) == 1:
        return children[0].tag
    return ""


def _kind(value: str, where: str, dtd_strict: bool, warnings: list) -> AnnotationKind:
    kind = AnnotationKind.parse(value)
    if dtd_strict and kind in MARK_KINDS:
        warnings.append(f"{where}: type {value!r} is an extension to the base schema")
    return kind


def _document(paper: ET.Element, where: str) -> DocumentRecord:
    doc_id = paper.get("paper_id")
    if not doc_id:
        raise SchemaViolation(f"{where}: <Paper> lacks paper_id")
    keywords = paper.get("keywords")
    created = paper.get("created")
    try:
        return DocumentRecord(
            doc_id=doc_id,
            file_name=_text(paper) or doc_id,
            title=paper.get("title"),
            author=paper.get("author"),
            keywords=tuple(json.loads(keywords)) if keywords is not None else None,
            summary=paper.get("summary"),
            created_at=parse_timestamp(created) if created else None,
        )
    except ValueError as exc:
        raise SchemaViolation(f"{where}: bad <Paper> metadata: {exc}") from None


def _target(on: ET.Element, where: str):
    p_id, c_id = on.get("p_id"), on.get("c_id")
    if p_id and c_id:
        raise SchemaViolation(f"{where}: <Annotation_on> has both p_id and c_id")
    if c_id:
        return OnAnnotation(c_id)
    if not p_id:
        raise SchemaViolation(f"{where}: <Annotation_on> needs p_id or c_id")
    page_s = on.get("page", "0")
    try:
        page = int(page_s)
    except ValueError:
        page = -1
    if page < 0:
        raise SchemaViolation(f"{where}: bad page attribute {page_s!r}")
    return OnDocument(p_id, page)


def parse_annotation_xml(data: bytes, dtd_strict: bool = False) -> IngestReport:
    """Parse an ``Annotation_List`` document into a validated report.

    Each ``Comment`` child becomes its own annotation, identified by its
    ``comment_id``; its nested ``type`` overrides the outer ``Type``.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise XmlSyntax(str(exc)) from None
    if root.tag != ROOT:
        raise SchemaViolation(f"root element must be <{ROOT}>, found <{root.tag}>")

    report = IngestReport()
    documents: dict[str, DocumentRecord] = {}
    for n, elem in enumerate(root, start=1):
        where = f"Annotation #{n}"
        if elem.tag != "Annotation":
            raise SchemaViolation(f"unexpected <{elem.tag}> under <{ROOT}>")
        author = _text(_child(elem, "Author", where))
        outer_type = _type_value(_child(elem, "Type", where))
        target = _target(_child(elem, "Annotation_on", where), where)
        stamp = _text(_child(elem, "Date_Time", where))
        try:
            created = parse_timestamp(stamp)
        except ValueError:
            raise SchemaViolation(f"{where}: bad Date_Time {stamp!r}") from None
        doc = _document(_child(elem, "Paper", where), where)
        documents.setdefault(doc.doc_id, doc)
        if isinstance(target, OnDocument) and target.doc_id != doc.doc_id:
            raise SchemaViolation(f"{where}: p_id {target.doc_id!r} does not match paper_id {doc.doc_id!r}")

        comments = elem.findall("Comment")
        if not comments:
            raise SchemaViolation(f"{where}: missing <Comment>")
        for comment in comments:
            ann_id = comment.get("comment_id")
            if not ann_id:
                raise SchemaViolation(f"{where}: <Comment> lacks comment_id")
            inner = comment.find("type")
            type_value = _type_value(inner) if inner is not None else ""
            kind = _kind(type_value or outer_type, where, dtd_strict, report.warnings)
            body_elem = comment.find("comment")
            body = (body_elem.text or "") if body_elem is not None else ""
            report.annotations.append(
                Annotation(ann_id, author, kind, body, target, created, doc_id=doc.doc_id)
            )
    report.documents = list(documents.values())
    return finalize(report)


def _paper(doc: DocumentRecord) -> ET.Element:
    paper = ET.Element("Paper", {"paper_id": doc.doc_id})
    if doc.title is not None:
        paper.set("title", doc.title)
    if doc.author is not None:
        paper.set("author", doc.author)
    if doc.keywords is not None:
        paper.set("keywords", json.dumps(list(doc.keywords), ensure_ascii=False))
    if doc.summary is not None:
        paper.set("summary", doc.summary)
    if doc.created_at is not None:
        paper.set("created", format_timestamp(doc.created_at))
    paper.text = doc.file_name
    return paper


def export_annotation_xml(report: IngestReport) -> bytes:
    """Serialise a validated report; annotations are written in id order.

    Documents without any annotation cannot be expressed in this format and
    are dropped.
    """
    docs = {d.doc_id: d for d in report.documents}
    root = ET.Element(ROOT)
    for ann in sorted(report.annotations, key=lambda a: a.annotation_id):
        doc_id: Optional[str] = ann.doc_id
        if doc_id is None:
            raise ValueError(f"annotation {ann.annotation_id!r} has no resolved document")
        elem = ET.SubElement(root, "Annotation")
        ET.SubElement(elem, "Author").text = ann.author_id
        ET.SubElement(elem, "Type").text = ann.kind.value
        if isinstance(ann.target, OnDocument):
            attrs = {"p_id": ann.target.doc_id, "page": str(ann.target.page_index)}
        else:
            attrs = {"c_id": ann.target.parent_id}
        ET.SubElement(elem, "Annotation_on", attrs)
        comment = ET.SubElement(elem, "Comment", {"comment_id": ann.annotation_id})
        ET.SubElement(comment, "type").text = ann.kind.value
        ET.SubElement(comment, "comment").text = ann.body
        ET.SubElement(elem, "Date_Time").text = format_timestamp(ann.created_at)
        elem.append(_paper(docs.get(doc_id) or DocumentRecord(doc_id, doc_id)))
    ET.indent(root)
    header = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        f"<!DOCTYPE {ROOT} [\n{DTD}]>\n"
    )
    # parsers fold a literal CR into LF, so carry it as a character reference
    body = ET.tostring(root, encoding="unicode").replace("\r", "&#13;")
    return (header + body + "\n").encode("utf-8")
