"""One test per acceptance criterion, named ``test_acN_...``.

The conftest hook prints an ``ACn: PASS/FAIL`` line per criterion at the end
of the run.
"""

import itertools
import random
import tempfile
import time
from datetime import datetime, timedelta, timezone
from fractions import Fraction
from pathlib import Path

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from annosent.aggregate import Mode, Verdict, collective_sentiment, count_annotations
from annosent.ingest import IngestReport, export_annotation_xml, extract_pdf_annotations, parse_annotation_xml
from annosent.lexicon import Lexicon, LexiconEntry, PosCategory, seed_lexicon
from annosent.model import Annotation, AnnotationKind, DocumentRecord, OnAnnotation, OnDocument
from annosent.scoring import AnnotationScore, apply_negation, score_annotation, signed_max_polarity
from annosent.store import open_store
from annosent.textprep import tokenize
from oracles import SAMPLE_COMMENTS, STOP, SEED_LEXICON, SAMPLE_ROWS, oracle_counts, oracle_score
from pdfgen import build_pdf

K = AnnotationKind
T0 = datetime(2012, 3, 1, tzinfo=timezone.utc)


# -- AC1 / AC2 / AC3: worked example ------------------------------------------


def test_ac1_sample_rows(lexicon):
    start = time.perf_counter()
    got = []
    for number, text in enumerate(SAMPLE_COMMENTS, start=1):
        for word in score_annotation(text, lexicon).words:
            got.append((number, word.token, Fraction(word.signed_max)))
    elapsed = time.perf_counter() - start
    assert len(got) == 16
    assert got == SAMPLE_ROWS
    assert elapsed < 1.0


def test_ac2_worked_example(lexicon):
    assert score_annotation("This article is quite well but not so good.", lexicon).sentiment_score == -0.34375


def test_ac3_sample_flat_adjusted(sample_report, lexicon):
    scores = {
        a.annotation_id: score_annotation(a.body, lexicon, annotation_id=a.annotation_id)
        for a in sample_report.annotations
    }
    result = collective_sentiment(sample_report.annotations, scores, "sample", Mode.ADJUSTED)
    # independent recomputation: exact mean of the oracle scores
    oracle = sum((oracle_score([t.surface for t in tokenize(text)]) for text in SAMPLE_COMMENTS), Fraction(0)) / 7
    assert oracle == Fraction(-13, 96)
    assert result.weighted_score == float(oracle)
    assert result.verdict is Verdict.NEGATIVE


# -- AC4: counting ------------------------------------------------------------


def random_corpus(rng, size):
    docs = ["D1", "D2", "D3"]
    kinds = [K.COMMENT, K.COMMENT, K.HIGHLIGHT, K.UNDERLINE, K.NOTE]
    records, anns = [], []
    for i in range(size):
        ann_id = f"a{i}"
        kind = rng.choice(kinds)
        if records and rng.random() < 0.4:
            parent = rng.choice(records)[0]
            records.append((ann_id, kind, parent, None))
            target = OnAnnotation(parent)
        else:
            doc = rng.choice(docs)
            records.append((ann_id, kind, None, doc))
            target = OnDocument(doc, rng.randrange(5))
        anns.append(Annotation(ann_id, rng.choice("ABC"), kind, "", target, T0 + timedelta(minutes=i)))
    return records, anns


def test_ac4_counts_match_brute_force():
    rng = random.Random(4)
    start = time.perf_counter()
    for _ in range(50):
        records, anns = random_corpus(rng, rng.randint(0, 30))
        rng.shuffle(anns)
        for doc in ("D1", "D2", "D3"):
            expected = oracle_counts(records, doc)
            counts = count_annotations(anns, doc)
            for kind in K:
                assert counts[kind] == expected.get(kind, 0)
            assert counts.total == sum(expected.values())
    assert time.perf_counter() - start < 5.0


# -- AC5: properties ----------------------------------------------------------

LEMMAS = ["alpha", "beta", "gamma", "delta", "epsilon", "not", "never"]
FILLER = ["the", "it", "zzz", "qq", "runs"]


@st.composite
def score_pairs(draw):
    p = draw(st.floats(0, 1))
    n = draw(st.floats(0, 1 - p))
    return p, n


@st.composite
def lexicons(draw):
    entries = {}
    for lemma in draw(st.lists(st.sampled_from(LEMMAS), unique=True)):
        pos = draw(st.sampled_from(list(PosCategory)))
        p, n = draw(score_pairs())
        entries[(lemma, pos)] = LexiconEntry(lemma, pos, p, n, max(0.0, 1 - p - n))
    return Lexicon(entries, "random")


@settings(max_examples=1000, deadline=None)
@given(lexicons(), st.lists(st.sampled_from(LEMMAS + FILLER), max_size=15))
def test_ac5a_score_in_unit_interval(lex, words):
    score = score_annotation(" ".join(words), lex).sentiment_score
    assert -1 <= score <= 1


@st.composite
def triples(draw):
    p, n = draw(score_pairs())
    return (p, n, max(0.0, 1 - p - n))


@settings(max_examples=200)
@given(triples())
def test_ac5b_negation_involution(t):
    assert apply_negation(apply_negation(t)) == t


@settings(max_examples=200)
@given(triples().filter(lambda t: max(t[0], t[1]) > t[2] and t[0] != t[1]))
def test_ac5c_negation_antisymmetry(t):
    assert signed_max_polarity(apply_negation(t)) == -signed_max_polarity(t)


dyadic = st.integers(-16, 16).map(lambda k: k / 16)
score_values = st.one_of(dyadic, st.floats(-1, 1))


@st.composite
def scored_graphs(draw, allow_meta=True):
    n = draw(st.integers(1, 12))
    anns, scores = [], {}
    for i in range(n):
        ann_id = f"n{i:02d}"
        kind = draw(st.sampled_from([K.COMMENT, K.COMMENT, K.NOTE, K.HIGHLIGHT]))
        if allow_meta and anns and draw(st.booleans()):
            target = OnAnnotation(draw(st.sampled_from(anns)).annotation_id)
        else:
            target = OnDocument("D")
        anns.append(Annotation(ann_id, "A", kind, "", target, T0))
        scores[ann_id] = AnnotationScore(ann_id, (), draw(score_values))
    return anns, scores


@settings(max_examples=200)
@given(scored_graphs(), st.randoms(), st.sampled_from(list(Mode)))
def test_ac5d_permutation_invariance(graph, rnd, mode):
    anns, scores = graph
    shuffled = list(anns)
    rnd.shuffle(shuffled)
    assert collective_sentiment(shuffled, scores, "D", mode) == collective_sentiment(anns, scores, "D", mode)


@settings(max_examples=200)
@given(scored_graphs(), st.data())
def test_ac5e_literal_mode_zeroes_leaves(graph, data):
    anns, scores = graph
    result = collective_sentiment(anns, scores, "D", Mode.LITERAL)
    leaves = [t.annotation_id for t in result.terms if t.meta_count == 0]
    assert all(t.weight == 0 for t in result.terms if t.meta_count == 0)
    # a leaf has no children whose exclusion could depend on it, so any value goes
    changed = dict(scores)
    for ann_id in leaves:
        changed[ann_id] = AnnotationScore(ann_id, (), data.draw(score_values))
    assert collective_sentiment(anns, changed, "D", Mode.LITERAL).weighted_score == result.weighted_score


@settings(max_examples=200)
@given(scored_graphs(allow_meta=False))
def test_ac5f_adjusted_flat_is_mean(graph):
    anns, scores = graph
    scoreable = [a for a in anns if a.kind in (K.COMMENT, K.NOTE)]
    result = collective_sentiment(anns, scores, "D", Mode.ADJUSTED)
    if not scoreable:
        assert result.weighted_score == 0
        return
    values = [Fraction(scores[a.annotation_id].sentiment_score) for a in scoreable]
    assert result.weighted_score == float(sum(values, Fraction(0)) / len(values))


@settings(max_examples=200)
@given(scored_graphs(), st.sampled_from(list(Mode)), st.data())
def test_ac5g_excluded_terms_have_no_effect(graph, mode, data):
    anns, scores = graph
    result = collective_sentiment(anns, scores, "D", mode)
    changed = dict(scores)
    for term in result.terms:
        if term.excluded:
            sign = 1 if term.score > 0 else -1
            new = sign * data.draw(st.floats(1e-6, 1))
            changed[term.annotation_id] = AnnotationScore(term.annotation_id, (), new)
    again = collective_sentiment(anns, changed, "D", mode)
    assert [t.excluded for t in again.terms] == [t.excluded for t in result.terms]
    assert again.weighted_score == result.weighted_score


# -- AC6: brute-force oracle --------------------------------------------------

VOCAB = sorted(SEED_LEXICON) + ["article", "never", "so"]


def test_ac6_oracle_equivalence(lexicon):
    assert len(VOCAB) == 10 and "so" in STOP
    cases = [c for n in range(1, 4) for c in itertools.product(VOCAB, repeat=n)]
    rng = random.Random(6)
    while len(cases) < 5000:
        cases.append(tuple(rng.choice(VOCAB) for _ in range(rng.randint(4, 6))))
    for tokens in cases:
        expected = float(oracle_score(list(tokens)))
        assert score_annotation(" ".join(tokens), lexicon).sentiment_score == expected, tokens


# -- AC7: round-trips ---------------------------------------------------------

ident = st.text("abcdefghijklmnopqrstuvwxyz0123456789-_.", min_size=1, max_size=8)
xml_text = st.text(st.characters(blacklist_categories=("Cs", "Cc")) | st.sampled_from("\n\t\r"), max_size=30)
stamps = st.datetimes(datetime(1990, 1, 1), datetime(2100, 1, 1), timezones=st.just(timezone.utc))


@st.composite
def documents(draw, doc_id):
    return DocumentRecord(
        doc_id,
        draw(ident) + ".pdf",
        title=draw(st.none() | xml_text),
        author=draw(st.none() | xml_text),
        keywords=draw(st.none() | st.lists(xml_text, max_size=3).map(tuple)),
        summary=draw(st.none() | xml_text),
        created_at=draw(st.none() | stamps),
    )


@st.composite
def corpora(draw):
    doc_ids = draw(st.lists(ident, min_size=1, max_size=3, unique=True))
    docs = [draw(documents(d)) for d in doc_ids]
    ids = draw(st.lists(ident, max_size=10, unique=True))
    anns = []
    for ann_id in ids:
        kind = draw(st.sampled_from([k for k in K]))
        if anns and draw(st.booleans()):
            parent = draw(st.sampled_from(anns))
            target, doc = OnAnnotation(parent.annotation_id), parent.doc_id
        else:
            doc = draw(st.sampled_from(doc_ids))
            target = OnDocument(doc, draw(st.integers(0, 50)))
        anns.append(Annotation(ann_id, draw(ident), kind, draw(xml_text), target, draw(stamps), doc_id=doc))
    return IngestReport(docs, anns)


@settings(max_examples=100, deadline=None)
@given(corpora())
def test_ac7_xml_round_trip(report):
    data = export_annotation_xml(report)
    again = parse_annotation_xml(data)
    assert sorted(again.annotations, key=lambda a: a.annotation_id) == sorted(
        report.annotations, key=lambda a: a.annotation_id
    )
    used = {a.doc_id for a in report.annotations}
    assert sorted(again.documents, key=lambda d: d.doc_id) == sorted(
        (d for d in report.documents if d.doc_id in used), key=lambda d: d.doc_id
    )
    assert export_annotation_xml(again) == data


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(corpora())
def test_ac7_store_reopen_and_dump_restore(report):
    lex = seed_lexicon()
    with tempfile.TemporaryDirectory() as tmp:
        first = Path(tmp) / "a.db"
        with open_store(first) as store:
            store.upsert(report)
            store.save_scores(
                [score_annotation(a.body, lex, annotation_id=a.annotation_id) for a in report.annotations],
                lex.source_description,
            )
            for doc in report.documents:
                on_doc = store.annotations(doc.doc_id)
                store.save_document_sentiment(
                    collective_sentiment(on_doc, store.scores(doc.doc_id), doc.doc_id, score_spans=True)
                )
            before_counts, before = store.row_counts(), store.dump()
        with open_store(first) as store:
            assert store.row_counts() == before_counts
            assert store.dump() == before
            assert sorted(store.annotations(), key=lambda a: a.annotation_id) == sorted(
                report.annotations, key=lambda a: a.annotation_id
            )
            assert sorted(store.documents(), key=lambda d: d.doc_id) == sorted(
                report.documents, key=lambda d: d.doc_id
            )
        with open_store(Path(tmp) / "b.db") as other:
            other.restore(before)
            assert other.dump() == before
            assert other.row_counts() == before_counts


# -- AC8: PDF -----------------------------------------------------------------


def test_ac8_pdf_fixture(tmp_path):
    pages = [
        [{"subtype": "Text", "contents": "It is good article"}, {"subtype": "Highlight", "contents": "main claim"}],
        [],
        [{"subtype": "Highlight", "contents": ""}, {"subtype": "Underline", "contents": "check (this)"}],
    ]
    path = tmp_path / "fixture.pdf"
    path.write_bytes(build_pdf(pages))
    got = [(a.kind, a.target.page_index, a.body) for a in extract_pdf_annotations(path).annotations]
    assert got == [
        (K.COMMENT, 0, "It is good article"),
        (K.HIGHLIGHT, 0, "main claim"),
        (K.HIGHLIGHT, 2, ""),
        (K.UNDERLINE, 2, "check (this)"),
    ]
    empty = tmp_path / "empty.pdf"
    empty.write_bytes(build_pdf([[]]))
    assert extract_pdf_annotations(empty).annotations == []
