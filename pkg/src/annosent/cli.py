"""Command-line front end: ingest -> store -> score -> aggregate.

Exit status is 0 on success, 2 for bad input or usage, 1 for anything else.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, TextIO

from annosent import aggregate
from annosent.aggregate import DocumentSentiment, Mode, collective_sentiment, is_scoreable
from annosent.errors import AnnosentError
from annosent.ingest import (
    extract_pdf_annotations,
    parse_annotation_xml,
    parse_jsonl,
)
from annosent.ingest.jsonl import annotation_to_dict, document_to_dict
from annosent.lexicon import Lexicon, LexiconFormat, load_lexicon_file, seed_lexicon
from annosent.scoring import AnnotationScore, score_annotation
from annosent.store import StoreHandle, open_store
from annosent.textprep import DEFAULT_STOPLIST, load_stoplist

logger = logging.getLogger("annosent")

EXIT_OK, EXIT_INTERNAL, EXIT_USER = 0, 1, 2

PLAIN_KIND_LABELS = (
    ("comment", "comments"),
    ("note", "notes"),
    ("help", "helps"),
    ("insert", "inserts"),
    ("paragraph", "paragraphs"),
    ("highlight", "highlights"),
    ("underline", "underlines"),
    ("unknown", "unknown"),
)


@dataclass
class CliConfig:
    store_path: Path
    lexicon_path: Optional[Path] = None
    lexicon_format: LexiconFormat = LexiconFormat.MINI
    stoplist_path: Optional[Path] = None
    mode: Mode = Mode.ADJUSTED
    epsilon: float = aggregate.DEFAULT_EPSILON
    score_spans: bool = False
    drop_objective: bool = False
    n_includes_marks: bool = False
    dtd_strict: bool = False
    output: str = "plain"
    out: TextIO = field(default=sys.stdout, repr=False)

    def __post_init__(self):
        if self.epsilon < 0:
            raise AnnosentError("--epsilon must be non-negative")
        self.store_path = Path(self.store_path).resolve()
        if self.lexicon_path is not None:
            self.lexicon_path = Path(self.lexicon_path).resolve()
        if self.stoplist_path is not None:
            self.stoplist_path = Path(self.stoplist_path).resolve()

    def lexicon(self) -> Lexicon:
        if self.lexicon_path is None:
            return seed_lexicon()
        try:
            return load_lexicon_file(self.lexicon_path, self.lexicon_format)
        except OSError as exc:
            raise AnnosentError(f"cannot read lexicon: {exc}") from None
        except UnicodeDecodeError as exc:
            raise AnnosentError(f"lexicon is not UTF-8: {exc}") from None

    def stoplist(self) -> frozenset:
        if self.stoplist_path is None:
            return DEFAULT_STOPLIST
        try:
            return load_stoplist(self.stoplist_path)
        except OSError as exc:
            raise AnnosentError(f"cannot read stoplist: {exc}") from None


def fmt(x: float, signed: bool = True) -> str:
    """Up to six decimals, trailing zeros trimmed."""
    text = f"{x:+.6f}" if signed else f"{x:.6f}"
    text = text.rstrip("0").rstrip(".")
    if text in ("+0", "-0", "0", ""):
        return "0"
    return text


def _emit(config: CliConfig, payload: dict, lines: list[str]) -> None:
    if config.output == "json":
        config.out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        config.out.write("".join(line + "\n" for line in lines))


def _score_dict(score: AnnotationScore) -> dict:
    return {
        "annotation_id": score.annotation_id,
        "sentiment_score": score.sentiment_score,
        "word_count": score.word_count,
        "no_sentiment_words": score.no_sentiment_words,
        "words": [
            {
                "token": w.token,
                "positivity": w.positivity,
                "negativity": w.negativity,
                "objectivity": w.objectivity,
                "signed_max": w.signed_max,
                "negated": w.negated,
            }
            for w in score.words
        ],
    }


def _score_lines(score: AnnotationScore) -> list[str]:
    head = f"{score.annotation_id}  S.S {fmt(score.sentiment_score)}"
    if score.no_sentiment_words:
        head += "  [no sentiment words]"
    lines = [head]
    for w in score.words:
        triple = ", ".join(fmt(v, signed=False) for v in (w.positivity, w.negativity, w.objectivity))
        mark = "  (negated)" if w.negated else ""
        lines.append(f"  {w.token}  ({triple})  {fmt(w.signed_max)}{mark}")
    return lines


def _detect_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix == ".pdf":
        return "pdf"
    if suffix == ".xml":
        return "xml"
    if suffix in (".jsonl", ".json", ".ndjson"):
        return "jsonl"
    head = path.read_bytes()[:1024].lstrip()
    if head.startswith(b"%PDF") or b"%PDF-" in head:
        return "pdf"
    if head.startswith(b"<"):
        return "xml"
    return "jsonl"


def cmd_ingest(config: CliConfig, input_path: Path, fmt_name: str = "auto") -> int:
    input_path = Path(input_path)
    if not input_path.exists():
        raise AnnosentError(f"no such file: {input_path}")
    kind = _detect_format(input_path) if fmt_name == "auto" else fmt_name
    if kind == "pdf":
        report = extract_pdf_annotations(input_path)
    elif kind == "xml":
        report = parse_annotation_xml(input_path.read_bytes(), dtd_strict=config.dtd_strict)
    else:
        report = parse_jsonl(input_path.read_bytes())
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    with open_store(config.store_path) as store:
        counts = store.upsert(report)
    payload = {
        "annotations_inserted": counts.annotations_inserted,
        "annotations_updated": counts.annotations_updated,
        "documents_inserted": counts.documents_inserted,
        "documents_updated": counts.documents_updated,
        "relations_inserted": counts.relations_inserted,
        "documents": [d.file_name for d in report.documents],
        "warnings": report.warnings,
    }
    lines = [
        f"{counts.annotations_inserted} annotations inserted",
        f"{counts.annotations_updated} annotations updated",
        f"{counts.documents_inserted} documents inserted",
        f"{counts.documents_updated} documents updated",
        f"{counts.relations_inserted} relations inserted",
    ]
    _emit(config, payload, lines)
    return EXIT_OK


def cmd_counts(config: CliConfig, file_name: str) -> int:
    with open_store(config.store_path) as store:
        doc = store.find_document(file_name)
        counts = aggregate.count_annotations(store.annotations(doc.doc_id), doc.doc_id)
    data = counts.to_dict()
    lines = [f"document: {doc.file_name} ({doc.doc_id})"]
    lines += [f"{label}: {data[key]}" for key, label in PLAIN_KIND_LABELS]
    lines.append(f"total: {counts.total}")
    _emit(config, {"document": doc.doc_id, "file_name": doc.file_name, "counts": data}, lines)
    return EXIT_OK


def _score_document(
    config: CliConfig, store: StoreHandle, doc_id: str, reuse: bool
) -> dict[str, AnnotationScore]:
    """Score the document's scoreable annotations, reusing stored scores if asked."""
    annotations = store.annotations(doc_id)
    existing = store.scores(doc_id) if reuse else {}
    todo = [
        a for a in annotations
        if is_scoreable(a, config.score_spans) and a.annotation_id not in existing
    ]
    if not todo:
        return existing
    lexicon = config.lexicon()
    stoplist = config.stoplist()
    fresh = [
        score_annotation(
            a.body, lexicon, stoplist,
            annotation_id=a.annotation_id, drop_objective=config.drop_objective,
        )
        for a in todo
    ]
    store.save_scores(fresh, lexicon.source_description)
    return {**existing, **{s.annotation_id: s for s in fresh}}


def cmd_score(config: CliConfig, file_name: str) -> int:
    with open_store(config.store_path) as store:
        doc = store.find_document(file_name)
        scores = _score_document(config, store, doc.doc_id, reuse=False)
    ordered = [scores[k] for k in sorted(scores)]
    lines = [f"document: {doc.file_name} ({doc.doc_id})"]
    for score in ordered:
        lines += _score_lines(score)
    _emit(config, {"document": doc.doc_id, "scores": [_score_dict(s) for s in ordered]}, lines)
    return EXIT_OK


def _sentiment_lines(ds: DocumentSentiment) -> list[str]:
    lines = [f"mode: {ds.mode.value}"]
    for t in ds.terms:
        line = (
            f"{t.annotation_id}  score {fmt(t.score)}  meta {t.meta_count}  "
            f"weight {fmt(t.weight, signed=False)}"
        )
        if t.excluded:
            line += f"  excluded: {t.exclusion_reason}"
        lines.append(line)
    lines.append(f"weighted_score: {fmt(ds.weighted_score)}")
    lines.append(f"verdict: {ds.verdict.value}")
    return lines


def cmd_collective(config: CliConfig, file_name: str, rescore: bool = False) -> int:
    with open_store(config.store_path) as store:
        doc = store.find_document(file_name)
        scores = _score_document(config, store, doc.doc_id, reuse=not rescore)
        result = collective_sentiment(
            store.annotations(doc.doc_id),
            scores,
            doc.doc_id,
            config.mode,
            config.epsilon,
            score_spans=config.score_spans,
            n_includes_marks=config.n_includes_marks,
        )
        store.save_document_sentiment(result)
    lines = [f"document: {doc.file_name} ({doc.doc_id})"] + _sentiment_lines(result)
    _emit(config, result.to_dict(), lines)
    return EXIT_OK


def cmd_query(config: CliConfig, by: str, key: str) -> int:
    with open_store(config.store_path) as store:
        if by == "annotator":
            rows = store.query_by_annotator(key)
            payload = {
                "annotator": key,
                "annotations": [
                    {**annotation_to_dict(a), "score": _score_dict(s) if s else None}
                    for a, s in rows
                ],
            }
            lines = [f"annotator: {key}  annotations: {len(rows)}"]
            for a, s in rows:
                shown = fmt(s.sentiment_score) if s is not None else "-"
                lines.append(f"{a.annotation_id}  {a.doc_id}  {a.kind.value}  S.S {shown}")
            _emit(config, payload, lines)
            return EXIT_OK
        doc, counts, sentiment = store.query_by_file(key)
    data = counts.to_dict()
    payload = {
        "document": document_to_dict(doc),
        "counts": data,
        "sentiment": sentiment.to_dict() if sentiment else None,
    }
    lines = [f"document: {doc.file_name} ({doc.doc_id})"]
    lines += [f"{label}: {data[k]}" for k, label in PLAIN_KIND_LABELS]
    lines.append(f"total: {counts.total}")
    if sentiment is None:
        lines.append("sentiment: not computed")
    else:
        lines.append(f"weighted_score: {fmt(sentiment.weighted_score)}")
        lines.append(f"verdict: {sentiment.verdict.value}")
    _emit(config, payload, lines)
    return EXIT_OK


def cmd_dump(config: CliConfig, target: Optional[Path]) -> int:
    with open_store(config.store_path) as store:
        data = store.dump()
    if target is None:
        config.out.write(data.decode("utf-8"))
    else:
        Path(target).write_bytes(data)
    return EXIT_OK


def cmd_restore(config: CliConfig, source: Path) -> int:
    source = Path(source)
    if not source.exists():
        raise AnnosentError(f"no such file: {source}")
    with open_store(config.store_path) as store:
        counts = store.restore(source.read_bytes())
    _emit(
        config,
        {"annotations_inserted": counts.annotations_inserted},
        [f"{counts.annotations_inserted} annotations restored"],
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="annosent",
        description="Annotation knowledge base with lexicon-based sentiment scoring.",
    )
    p.add_argument("--store", default="annosent.db", help="store file (default: %(default)s)")
    p.add_argument("--lexicon", type=Path, help="lexicon file (default: bundled seven-word lexicon)")
    p.add_argument("--lexicon-format", choices=[f.value for f in LexiconFormat], default="mini")
    p.add_argument("--stoplist", type=Path, help="stop-word file, one word per line")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.ADJUSTED.value)
    p.add_argument("--epsilon", type=float, default=aggregate.DEFAULT_EPSILON)
    p.add_argument("--output", choices=["plain", "json"], default="plain")
    p.add_argument("--score-spans", action="store_true", help="score highlight/underline text")
    p.add_argument("--drop-objective", action="store_true", help="skip objectivity-dominant words")
    p.add_argument("--n-includes-marks", action="store_true",
                   help="count highlights/underlines in the weight denominator")
    p.add_argument("--dtd-strict", action="store_true", help="warn on schema extensions in XML")
    p.add_argument("-v", "--verbose", action="store_true")

    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("ingest", help="load annotations from XML, JSON lines or PDF")
    s.add_argument("input", type=Path)
    s.add_argument("--format", dest="input_format", choices=["auto", "xml", "jsonl", "pdf"], default="auto")
    s = sub.add_parser("counts", help="annotation counts per kind")
    s.add_argument("file_name")
    s = sub.add_parser("score", help="score every scoreable annotation of a document")
    s.add_argument("file_name")
    s = sub.add_parser("collective", help="weighted collective sentiment of a document")
    s.add_argument("file_name")
    s.add_argument("--rescore", action="store_true", help="ignore stored scores")
    s = sub.add_parser("query", help="look up by annotator id or file name")
    s.add_argument("by", choices=["annotator", "file"])
    s.add_argument("key")
    s = sub.add_parser("dump", help="write the store as JSON lines")
    s.add_argument("target", type=Path, nargs="?")
    s = sub.add_parser("restore", help="load a JSON-lines dump into the store")
    s.add_argument("source", type=Path)
    return p


def main(argv: Optional[list[str]] = None, out: Optional[TextIO] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        config = CliConfig(
            store_path=args.store,
            lexicon_path=args.lexicon,
            lexicon_format=LexiconFormat(args.lexicon_format),
            stoplist_path=args.stoplist,
            mode=Mode(args.mode),
            epsilon=args.epsilon,
            score_spans=args.score_spans,
            drop_objective=args.drop_objective,
            n_includes_marks=args.n_includes_marks,
            dtd_strict=args.dtd_strict,
            output=args.output,
            out=out or sys.stdout,
        )
        if args.command == "ingest":
            return cmd_ingest(config, args.input, args.input_format)
        if args.command == "counts":
            return cmd_counts(config, args.file_name)
        if args.command == "score":
            return cmd_score(config, args.file_name)
        if args.command == "collective":
            return cmd_collective(config, args.file_name, args.rescore)
        if args.command == "query":
            return cmd_query(config, args.by, args.key)
        if args.command == "dump":
            return cmd_dump(config, args.target)
        return cmd_restore(config, args.source)
    except AnnosentError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USER
    except Exception:
        logger.exception("internal failure")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
