"""Annotation and metadata extraction from PDF files (via pypdf)."""

from __future__ import annotations

import hashlib
import logging
import os
import re
from datetime import datetime, timedelta, timezone
from io import BytesIO
from pathlib import Path
from typing import Optional, Union

from pypdf import PdfReader
from pypdf.errors import PyPdfError

from annosent.errors import PdfEncrypted, PdfUnreadable
from annosent.ingest.report import IngestReport, finalize
from annosent.model import Annotation, AnnotationKind, DocumentRecord, OnDocument

logger = logging.getLogger(__name__)

SUBTYPE_KINDS = {
    "/Text": AnnotationKind.COMMENT,
    "/Highlight": AnnotationKind.HIGHLIGHT,
    "/Underline": AnnotationKind.UNDERLINE,
    "/FreeText": AnnotationKind.NOTE,
}
# popups are the display window of another annotation, not marks of their own
SKIPPED_SUBTYPES = {"/Popup"}

UNKNOWN_AUTHOR = "unknown"
EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)

_PDF_DATE_RE = re.compile(
    r"^(?:D:)?(\d{4})(\d{2})?(\d{2})?(\d{2})?(\d{2})?(\d{2})?"
    r"(?:([Zz+\-])(\d{2})?'?(\d{2})?'?)?"
)


def parse_pdf_date(value) -> Optional[datetime]:
    """Parse a PDF date string (``D:YYYYMMDDHHmmSSOHH'mm'``) to UTC."""
    if value is None:
        return None
    m = _PDF_DATE_RE.match(str(value).strip())
    if not m:
        return None
    year, month, day, hour, minute, second, sign, tz_h, tz_m = m.groups()
    try:
        dt = datetime(
            int(year), int(month or 1), int(day or 1),
            int(hour or 0), int(minute or 0), int(second or 0), tzinfo=timezone.utc,
        )
    except ValueError:
        return None
    if sign in ("+", "-"):
        offset = timedelta(hours=int(tz_h or 0), minutes=int(tz_m or 0))
        dt = dt - offset if sign == "+" else dt + offset
    return dt


def _open(path: Union[str, os.PathLike]) -> tuple[PdfReader, bytes]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise PdfUnreadable(f"{path}: {exc}") from None
    if b"%PDF-" not in data[:1024]:
        raise PdfUnreadable(f"{path}: not a PDF file")
    try:
        reader = PdfReader(BytesIO(data), strict=False)
        if reader.is_encrypted:
            raise PdfEncrypted(f"{path}: encrypted PDFs are not supported")
        len(reader.pages)
    except PdfEncrypted:
        raise
    except Exception as exc:  # pypdf raises a wide range of types on damaged files
        raise PdfUnreadable(f"{path}: {exc}") from None
    return reader, data


def document_id(data: bytes) -> str:
    """Content-derived id, so re-ingesting the same file is idempotent."""
    return "pdf-" + hashlib.sha256(data).hexdigest()[:16]


def _clean(value) -> Optional[str]:
    if value is None:
        return None
    text = str(value).strip()
    return text or None


def _keywords(value) -> Optional[tuple[str, ...]]:
    text = _clean(value)
    if text is None:
        return None
    parts = tuple(p.strip() for p in re.split(r"[,;]", text) if p.strip())
    return parts or None


def _metadata(reader: PdfReader, path: Path, doc_id: str) -> DocumentRecord:
    info = reader.metadata or {}
    return DocumentRecord(
        doc_id=doc_id,
        file_name=path.name,
        title=_clean(info.get("/Title")),
        author=_clean(info.get("/Author")),
        keywords=_keywords(info.get("/Keywords")),
        summary=_clean(info.get("/Subject")),
        created_at=parse_pdf_date(info.get("/CreationDate")),
    )


def extract_pdf_metadata(path: Union[str, os.PathLike]) -> DocumentRecord:
    """Read Title/Author/Keywords/Subject/CreationDate from the info dictionary.

    Missing or blank fields come back as None.
    """
    reader, data = _open(path)
    try:
        return _metadata(reader, Path(path), document_id(data))
    except (PyPdfError, ValueError, KeyError, TypeError) as exc:
        raise PdfUnreadable(f"{path}: {exc}") from None


def extract_pdf_annotations(path: Union[str, os.PathLike]) -> IngestReport:
    reader, data = _open(path)
    path = Path(path)
    doc_id = document_id(data)
    try:
        doc = _metadata(reader, path, doc_id)
        annotations = []
        for page_index, page in enumerate(reader.pages):
            annots = page.get("/Annots")
            if annots is None:
                continue
            for n, ref in enumerate(annots.get_object()):
                obj = ref.get_object()
                subtype = str(obj.get("/Subtype", ""))
                if subtype in SKIPPED_SUBTYPES:
                    continue
                kind = SUBTYPE_KINDS.get(subtype, AnnotationKind.UNKNOWN)
                created = (
                    parse_pdf_date(obj.get("/CreationDate"))
                    or parse_pdf_date(obj.get("/M"))
                    or doc.created_at
                    or EPOCH
                )
                annotations.append(
                    Annotation(
                        annotation_id=f"{doc_id}:p{page_index}:a{n}",
                        author_id=_clean(obj.get("/T")) or UNKNOWN_AUTHOR,
                        kind=kind,
                        body=str(obj.get("/Contents") or ""),
                        target=OnDocument(doc_id, page_index),
                        created_at=created,
                    )
                )
    except (PyPdfError, ValueError, KeyError, TypeError, AttributeError, IndexError) as exc:
        raise PdfUnreadable(f"{path}: {exc}") from None
    logger.debug("%s: %d annotations on %d pages", path, len(annotations), len(reader.pages))
    return finalize(IngestReport([doc], annotations))
