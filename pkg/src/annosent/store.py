"""Single-file relational store for documents, annotations and sentiments.

Five tables back the store: ``documents``, ``annotations``,
``annotation_relations`` (meta-annotation edges), ``sentiment_words`` (lexicon
rows that scored at least one stored annotation) and
``sentiment_annotations``. The latest collective verdict of a document is kept
on its ``documents`` row.

Writes take an immediate (reserved) lock; a second writer is rejected with
StoreLocked instead of waiting. The database runs in WAL mode so readers are
never blocked.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import sqlite3
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from annosent.aggregate import AnnotationCounts, DocumentSentiment
from annosent.errors import (
    DanglingReference,
    IoFailure,
    SchemaMismatch,
    SchemaViolation,
    StoreLocked,
    UnknownDocument,
)
from annosent.ingest.jsonl import (
    annotation_from_dict,
    annotation_to_dict,
    document_from_dict,
    document_to_dict,
    dumps_line,
    iter_records,
)
from annosent.ingest.report import IngestReport, finalize
from annosent.model import (
    Annotation,
    AnnotationKind,
    DocumentRecord,
    OnAnnotation,
    OnDocument,
    format_timestamp,
    parse_timestamp,
    topological_order,
)
from annosent.scoring import AnnotationScore, SignedWordScore

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SCHEMA = """
CREATE TABLE documents (
    doc_id      TEXT PRIMARY KEY,
    file_name   TEXT NOT NULL,
    title       TEXT,
    author      TEXT,
    keywords    TEXT,
    summary     TEXT,
    created_at  TEXT,
    sentiment   TEXT
);
CREATE INDEX documents_file_name ON documents(file_name);
CREATE TABLE annotations (
    annotation_id TEXT PRIMARY KEY,
    doc_id        TEXT NOT NULL REFERENCES documents(doc_id),
    author_id     TEXT NOT NULL,
    kind          TEXT NOT NULL,
    body          TEXT NOT NULL,
    target_type   TEXT NOT NULL CHECK (target_type IN ('document', 'annotation')),
    target_ref    TEXT NOT NULL,
    page_index    INTEGER,
    created_at    TEXT NOT NULL
);
CREATE INDEX annotations_author ON annotations(author_id);
CREATE INDEX annotations_doc ON annotations(doc_id);
CREATE TABLE annotation_relations (
    child_id   TEXT PRIMARY KEY REFERENCES annotations(annotation_id) ON DELETE CASCADE,
    parent_id  TEXT NOT NULL REFERENCES annotations(annotation_id) ON DELETE CASCADE
);
CREATE TABLE sentiment_words (
    lemma        TEXT NOT NULL,
    pos          TEXT NOT NULL,
    source       TEXT NOT NULL,
    positivity   REAL NOT NULL,
    negativity   REAL NOT NULL,
    objectivity  REAL NOT NULL,
    PRIMARY KEY (lemma, pos, source)
);
CREATE TABLE sentiment_annotations (
    annotation_id    TEXT PRIMARY KEY REFERENCES annotations(annotation_id) ON DELETE CASCADE,
    sentiment_score  REAL NOT NULL,
    word_count       INTEGER NOT NULL,
    words            TEXT NOT NULL,
    lexicon          TEXT NOT NULL
);
"""

TABLES = (
    "documents",
    "annotations",
    "annotation_relations",
    "sentiment_words",
    "sentiment_annotations",
)


@dataclass
class UpsertCounts:
    documents_inserted: int = 0
    documents_updated: int = 0
    annotations_inserted: int = 0
    annotations_updated: int = 0
    relations_inserted: int = 0

    @property
    def updated(self) -> int:
        return self.documents_updated + self.annotations_updated


def _doc_row(doc: DocumentRecord) -> tuple:
    return (
        doc.doc_id,
        doc.file_name,
        doc.title,
        doc.author,
        json.dumps(list(doc.keywords), ensure_ascii=False) if doc.keywords is not None else None,
        doc.summary,
        format_timestamp(doc.created_at) if doc.created_at else None,
    )


def _doc_from_row(row) -> DocumentRecord:
    return DocumentRecord(
        doc_id=row["doc_id"],
        file_name=row["file_name"],
        title=row["title"],
        author=row["author"],
        keywords=tuple(json.loads(row["keywords"])) if row["keywords"] is not None else None,
        summary=row["summary"],
        created_at=parse_timestamp(row["created_at"]) if row["created_at"] else None,
    )


def _ann_row(ann: Annotation) -> tuple:
    if isinstance(ann.target, OnDocument):
        target = ("document", ann.target.doc_id, ann.target.page_index)
    else:
        target = ("annotation", ann.target.parent_id, None)
    return (
        ann.annotation_id,
        ann.doc_id,
        ann.author_id,
        ann.kind.value,
        ann.body,
        *target,
        format_timestamp(ann.created_at),
    )


def _ann_from_row(row) -> Annotation:
    if row["target_type"] == "document":
        target = OnDocument(row["target_ref"], row["page_index"])
    else:
        target = OnAnnotation(row["target_ref"])
    return Annotation(
        annotation_id=row["annotation_id"],
        author_id=row["author_id"],
        kind=AnnotationKind(row["kind"]),
        body=row["body"],
        target=target,
        created_at=parse_timestamp(row["created_at"]),
        doc_id=row["doc_id"],
    )


def _score_from_row(row) -> AnnotationScore:
    words = tuple(SignedWordScore(**w) for w in json.loads(row["words"]))
    return AnnotationScore(row["annotation_id"], words, row["sentiment_score"])


class StoreHandle:
    """An open store. Use :func:`open_store` to obtain one."""

    def __init__(self, location: Union[str, os.PathLike], lock_timeout: float = 0.0):
        self.location = Path(location)
        self.schema_version = SCHEMA_VERSION
        try:
            self._conn = sqlite3.connect(
                self.location, timeout=lock_timeout, isolation_level=None
            )
            self._conn.row_factory = sqlite3.Row
            self._conn.execute("PRAGMA foreign_keys = ON")
            self._init_schema()
        except sqlite3.DatabaseError as exc:
            raise IoFailure(f"{self.location}: {exc}") from None

    def _init_schema(self):
        version = self._conn.execute("PRAGMA user_version").fetchone()[0]
        tables = {
            r[0] for r in self._conn.execute("SELECT name FROM sqlite_master WHERE type = 'table'")
        }
        if version == 0 and not tables:
            self._conn.execute("PRAGMA journal_mode = WAL")
            with self._write():
                for statement in SCHEMA.split(";"):
                    if statement.strip():
                        self._conn.execute(statement)
                self._conn.execute(f"PRAGMA user_version = {SCHEMA_VERSION}")
            logger.info("created store %s", self.location)
        elif version != SCHEMA_VERSION or not set(TABLES) <= tables:
            self._conn.close()
            raise SchemaMismatch(
                f"{self.location}: schema version {version}, expected {SCHEMA_VERSION}"
            )

    # -- plumbing -----------------------------------------------------------

    @contextmanager
    def _write(self):
        try:
            self._conn.execute("BEGIN IMMEDIATE")
        except sqlite3.OperationalError as exc:
            if "locked" in str(exc) or "busy" in str(exc):
                raise StoreLocked(f"{self.location}: another writer holds the store") from None
            raise IoFailure(f"{self.location}: {exc}") from None
        try:
            yield self._conn
        except BaseException:
            self._conn.execute("ROLLBACK")
            raise
        else:
            try:
                self._conn.execute("COMMIT")
            except sqlite3.DatabaseError as exc:
                raise IoFailure(f"{self.location}: {exc}") from None

    def _query(self, sql: str, params: Iterable = ()):
        try:
            return self._conn.execute(sql, tuple(params)).fetchall()
        except sqlite3.DatabaseError as exc:
            raise IoFailure(f"{self.location}: {exc}") from None

    def close(self):
        self._conn.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def row_counts(self) -> dict[str, int]:
        return {t: self._query(f"SELECT COUNT(*) FROM {t}")[0][0] for t in TABLES}

    # -- writes -------------------------------------------------------------

    def upsert(self, report: IngestReport) -> UpsertCounts:
        """Insert or update everything in ``report``; identical rows are left alone.

        Updating an annotation drops its stored score, and any change to a
        document's annotations drops that document's stored verdict.
        """
        counts = UpsertCounts()
        touched_docs = set()
        with self._write() as db:
            documents, annotations = self._complete(db, report)
            for doc in documents:
                row = _doc_row(doc)
                existing = db.execute(
                    "SELECT doc_id, file_name, title, author, keywords, summary, created_at "
                    "FROM documents WHERE doc_id = ?",
                    (doc.doc_id,),
                ).fetchone()
                if existing is None:
                    db.execute(
                        "INSERT INTO documents (doc_id, file_name, title, author, keywords, "
                        "summary, created_at) VALUES (?, ?, ?, ?, ?, ?, ?)",
                        row,
                    )
                    counts.documents_inserted += 1
                elif tuple(existing) != row:
                    db.execute(
                        "UPDATE documents SET file_name = ?, title = ?, author = ?, keywords = ?, "
                        "summary = ?, created_at = ? WHERE doc_id = ?",
                        row[1:] + row[:1],
                    )
                    counts.documents_updated += 1

            for ann in annotations:
                row = _ann_row(ann)
                existing = db.execute(
                    "SELECT annotation_id, doc_id, author_id, kind, body, target_type, "
                    "target_ref, page_index, created_at FROM annotations WHERE annotation_id = ?",
                    (ann.annotation_id,),
                ).fetchone()
                if existing is None:
                    db.execute("INSERT INTO annotations VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)", row)
                    counts.annotations_inserted += 1
                elif tuple(existing) != row:
                    db.execute(
                        "UPDATE annotations SET doc_id = ?, author_id = ?, kind = ?, body = ?, "
                        "target_type = ?, target_ref = ?, page_index = ?, created_at = ? "
                        "WHERE annotation_id = ?",
                        row[1:] + row[:1],
                    )
                    db.execute(
                        "DELETE FROM sentiment_annotations WHERE annotation_id = ?",
                        (ann.annotation_id,),
                    )
                    db.execute(
                        "DELETE FROM annotation_relations WHERE child_id = ?", (ann.annotation_id,)
                    )
                    counts.annotations_updated += 1
                else:
                    continue
                touched_docs.add(ann.doc_id)
                if isinstance(ann.target, OnAnnotation):
                    db.execute(
                        "INSERT OR IGNORE INTO annotation_relations (child_id, parent_id) "
                        "VALUES (?, ?)",
                        (ann.annotation_id, ann.target.parent_id),
                    )
                    counts.relations_inserted += 1
            for doc_id in touched_docs:
                db.execute("UPDATE documents SET sentiment = NULL WHERE doc_id = ?", (doc_id,))
        return counts

    @staticmethod
    def _complete(db, report: IngestReport) -> tuple[list[DocumentRecord], list[Annotation]]:
        # Meta-annotations may point at parents already in the store; take
        # their document from there and synthesise any undeclared documents.
        doc_of: dict[str, str] = {}
        annotations = []
        for ann in topological_order(report.annotations):
            if ann.doc_id is None:
                parent = ann.parent_id
                doc_id = doc_of.get(parent)
                if doc_id is None:
                    row = db.execute(
                        "SELECT doc_id FROM annotations WHERE annotation_id = ?", (parent,)
                    ).fetchone()
                    if row is None:
                        raise DanglingReference(f"{ann.annotation_id}: no annotation {parent!r}")
                    doc_id = row[0]
                ann = dataclasses.replace(ann, doc_id=doc_id)
            doc_of[ann.annotation_id] = ann.doc_id
            annotations.append(ann)
        documents = list(report.documents)
        declared = {d.doc_id for d in documents}
        for doc_id in sorted(set(doc_of.values()) - declared):
            known = db.execute("SELECT 1 FROM documents WHERE doc_id = ?", (doc_id,)).fetchone()
            if known is None:
                documents.append(DocumentRecord(doc_id, doc_id))
        return documents, annotations

    def save_scores(self, scores: Iterable[AnnotationScore], lexicon_source: str) -> int:
        """Store per-annotation scores, replacing earlier ones."""
        n = 0
        with self._write() as db:
            for score in scores:
                words = [dataclasses.asdict(w) for w in score.words]
                db.execute(
                    "INSERT OR REPLACE INTO sentiment_annotations VALUES (?, ?, ?, ?, ?)",
                    (
                        score.annotation_id,
                        score.sentiment_score,
                        score.word_count,
                        json.dumps(words),
                        lexicon_source,
                    ),
                )
                for w in score.words:
                    pos, neg = (w.negativity, w.positivity) if w.negated else (w.positivity, w.negativity)
                    db.execute(
                        "INSERT OR REPLACE INTO sentiment_words VALUES (?, ?, ?, ?, ?, ?)",
                        (w.lemma, w.pos, lexicon_source, pos, neg, w.objectivity),
                    )
                n += 1
        return n

    def save_document_sentiment(self, sentiment: DocumentSentiment) -> None:
        with self._write() as db:
            cur = db.execute(
                "UPDATE documents SET sentiment = ? WHERE doc_id = ?",
                (json.dumps(sentiment.to_dict()), sentiment.doc_id),
            )
            if cur.rowcount == 0:
                raise UnknownDocument(f"unknown document {sentiment.doc_id!r}")

    # -- reads --------------------------------------------------------------

    def documents(self) -> list[DocumentRecord]:
        return [_doc_from_row(r) for r in self._query("SELECT * FROM documents ORDER BY doc_id")]

    def find_document(self, key: str) -> DocumentRecord:
        """Resolve a document by file name, falling back to its id."""
        rows = self._query("SELECT * FROM documents WHERE file_name = ? ORDER BY doc_id", (key,))
        if len(rows) > 1:
            ids = ", ".join(r["doc_id"] for r in rows)
            raise UnknownDocument(f"file name {key!r} is ambiguous ({ids}); use a document id")
        if not rows:
            rows = self._query("SELECT * FROM documents WHERE doc_id = ?", (key,))
        if not rows:
            raise UnknownDocument(f"unknown document {key!r}")
        return _doc_from_row(rows[0])

    def annotations(self, doc_id: Optional[str] = None) -> list[Annotation]:
        if doc_id is None:
            rows = self._query("SELECT * FROM annotations ORDER BY annotation_id")
        else:
            rows = self._query(
                "SELECT * FROM annotations WHERE doc_id = ? ORDER BY annotation_id", (doc_id,)
            )
        return [_ann_from_row(r) for r in rows]

    def relations(self) -> list[tuple[str, str]]:
        rows = self._query("SELECT parent_id, child_id FROM annotation_relations ORDER BY child_id")
        return [(r[0], r[1]) for r in rows]

    def scores(self, doc_id: Optional[str] = None) -> dict[str, AnnotationScore]:
        if doc_id is None:
            rows = self._query("SELECT * FROM sentiment_annotations")
        else:
            rows = self._query(
                "SELECT s.* FROM sentiment_annotations s JOIN annotations a "
                "USING (annotation_id) WHERE a.doc_id = ?",
                (doc_id,),
            )
        return {r["annotation_id"]: _score_from_row(r) for r in rows}

    def document_sentiment(self, doc_id: str) -> Optional[DocumentSentiment]:
        rows = self._query("SELECT sentiment FROM documents WHERE doc_id = ?", (doc_id,))
        if not rows:
            raise UnknownDocument(f"unknown document {doc_id!r}")
        raw = rows[0][0]
        return DocumentSentiment.from_dict(json.loads(raw)) if raw else None

    def counts(self, doc_id: str) -> AnnotationCounts:
        rows = self._query(
            "SELECT kind, COUNT(*) FROM annotations WHERE doc_id = ? GROUP BY kind", (doc_id,)
        )
        tally = {AnnotationKind(k): n for k, n in rows}
        return AnnotationCounts({k: tally.get(k, 0) for k in AnnotationKind})

    def query_by_annotator(self, author_id: str) -> list[tuple[Annotation, Optional[AnnotationScore]]]:
        """All annotations by one annotator, oldest first, with stored scores."""
        rows = self._query(
            "SELECT a.*, s.sentiment_score, s.words FROM annotations a "
            "LEFT JOIN sentiment_annotations s USING (annotation_id) "
            "WHERE a.author_id = ?",
            (author_id,),
        )
        out = []
        for r in rows:
            score = _score_from_row(r) if r["words"] is not None else None
            out.append((_ann_from_row(r), score))
        out.sort(key=lambda pair: (pair[0].created_at, pair[0].annotation_id))
        return out

    def query_by_file(
        self, file_name: str
    ) -> tuple[DocumentRecord, AnnotationCounts, Optional[DocumentSentiment]]:
        doc = self.find_document(file_name)
        return doc, self.counts(doc.doc_id), self.document_sentiment(doc.doc_id)

    # -- dump / restore -----------------------------------------------------

    def dump(self) -> bytes:
        """Serialise the whole store as JSON lines (see ``annosent.ingest.jsonl``)."""
        lines = [dumps_line(document_to_dict(d)) for d in self.documents()]
        lines += [dumps_line(annotation_to_dict(a)) for a in self.annotations()]
        lines += [
            dumps_line({"record": "relation", "parent": p, "child": c}) for p, c in self.relations()
        ]
        for r in self._query("SELECT * FROM sentiment_words ORDER BY lemma, pos, source"):
            lines.append(dumps_line({"record": "word", **dict(r)}))
        for r in self._query("SELECT * FROM sentiment_annotations ORDER BY annotation_id"):
            lines.append(
                dumps_line(
                    {
                        "record": "score",
                        "annotation_id": r["annotation_id"],
                        "sentiment_score": r["sentiment_score"],
                        "words": json.loads(r["words"]),
                        "lexicon": r["lexicon"],
                    }
                )
            )
        for r in self._query(
            "SELECT sentiment FROM documents WHERE sentiment IS NOT NULL ORDER BY doc_id"
        ):
            lines.append(dumps_line({"record": "sentiment", **json.loads(r[0])}))
        return "".join(line + "\n" for line in lines).encode("utf-8")

    def restore(self, data: bytes) -> UpsertCounts:
        report = IngestReport()
        words, scores, sentiments, relations = [], [], [], set()
        for _line_no, kind, obj in iter_records(data):
            if kind == "document":
                report.documents.append(document_from_dict(obj))
            elif kind == "annotation":
                report.annotations.append(annotation_from_dict(obj))
            elif kind == "relation":
                relations.add((obj["parent"], obj["child"]))
            elif kind == "word":
                words.append(obj)
            elif kind == "score":
                scores.append(obj)
            elif kind == "sentiment":
                sentiments.append(obj)
        report = finalize(report)
        derived = {(a.parent_id, a.annotation_id) for a in report.annotations if a.is_meta}
        if relations - derived:
            raise SchemaViolation(f"relation rows without matching annotations: {sorted(relations - derived)}")
        counts = self.upsert(report)
        with self._write() as db:
            for w in words:
                db.execute(
                    "INSERT OR REPLACE INTO sentiment_words VALUES (?, ?, ?, ?, ?, ?)",
                    (w["lemma"], w["pos"], w["source"], w["positivity"], w["negativity"], w["objectivity"]),
                )
            for s in scores:
                db.execute(
                    "INSERT OR REPLACE INTO sentiment_annotations VALUES (?, ?, ?, ?, ?)",
                    (
                        s["annotation_id"],
                        s["sentiment_score"],
                        len(s["words"]),
                        json.dumps(s["words"]),
                        s["lexicon"],
                    ),
                )
            for s in sentiments:
                db.execute(
                    "UPDATE documents SET sentiment = ? WHERE doc_id = ?",
                    (json.dumps({k: v for k, v in s.items() if k != "record"}), s["doc_id"]),
                )
        return counts


def open_store(location: Union[str, os.PathLike], lock_timeout: float = 0.0) -> StoreHandle:
    """Create or open the store at ``location``.

    Raises SchemaMismatch when the file was written with another schema
    version and IoFailure when it cannot be opened at all.
    """
    return StoreHandle(location, lock_timeout)
