"""Ingestion from annotation XML, JSON lines and PDF files."""

from annosent.ingest.report import IngestReport, finalize
from annosent.ingest.jsonl import parse_jsonl, write_jsonl
from annosent.ingest.pdf import extract_pdf_annotations, extract_pdf_metadata
from annosent.ingest.xmlio import export_annotation_xml, parse_annotation_xml

__all__ = [
    "IngestReport",
    "finalize",
    "parse_jsonl",
    "write_jsonl",
    "parse_annotation_xml",
    "export_annotation_xml",
    "extract_pdf_annotations",
    "extract_pdf_metadata",
]
