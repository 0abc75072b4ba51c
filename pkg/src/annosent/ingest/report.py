"""Result of an ingest run."""

from __future__ import annotations

from dataclasses import dataclass, field

from annosent.errors import DanglingReference, InvalidGraph
from annosent.model import Annotation, DocumentRecord, resolve_doc_ids, validate_graph


@dataclass
class IngestReport:
    documents: list[DocumentRecord] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def finalize(report: IngestReport) -> IngestReport:
    """Validate the annotation graph and fill derived document ids.

    Raises DanglingReference for unresolved parents and InvalidGraph for any
    other violation. Documents referenced by annotations but not declared are
    synthesised with the doc id as file name.
    """
    violations = validate_graph(report.annotations)
    missing = [v for v in violations if v.kind == "MissingParent"]
    if missing:
        raise DanglingReference("; ".join(f"{v.ids[0]}: {v.detail}" for v in missing))
    if violations:
        raise InvalidGraph(violations)
    annotations = resolve_doc_ids(report.annotations)
    known = {d.doc_id for d in report.documents}
    documents = list(report.documents)
    for a in annotations:
        if a.doc_id not in known:
            documents.append(DocumentRecord(a.doc_id, a.doc_id))
            known.add(a.doc_id)
    return IngestReport(documents, annotations, list(report.warnings))
