from fractions import Fraction

import pytest

from annosent.aggregate import (
    CONTRADICTS_PARENT,
    Mode,
    Verdict,
    classify,
    collective_sentiment,
    count_annotations,
)
from annosent.errors import MissingScore, UnknownDocument
from annosent.model import AnnotationKind
from annosent.scoring import AnnotationScore, score_annotation
from factories import ann

K = AnnotationKind


def fixed(ann_id, value):
    return AnnotationScore(ann_id, (), value)


def test_count_empty():
    counts = count_annotations([], "D")
    assert counts.total == 0 and all(v == 0 for v in counts.per_kind.values())


def test_count_sample(sample_report):
    counts = count_annotations(sample_report.annotations, "sample")
    assert counts[K.COMMENT] == 7 and counts.total == 7


def test_count_mixed():
    anns = [
        ann("h1", kind=K.HIGHLIGHT), ann("h2", kind=K.HIGHLIGHT),
        ann("u1", kind=K.UNDERLINE), ann("c1"), ann("x", doc="OTHER"),
    ]
    counts = count_annotations(anns, "D")
    assert (counts[K.HIGHLIGHT], counts[K.UNDERLINE], counts[K.COMMENT], counts.total) == (2, 1, 1, 4)


def test_count_includes_meta_annotations():
    counts = count_annotations([ann("p"), ann("m", parent="p"), ann("mm", parent="m")], "D")
    assert counts.total == 3


def test_count_unknown_document():
    with pytest.raises(UnknownDocument):
        count_annotations([ann("a")], "NOPE", documents={"D"})


def test_sample_flat_adjusted(sample_report, lexicon):
    scores = {
        a.annotation_id: score_annotation(a.body, lexicon, annotation_id=a.annotation_id)
        for a in sample_report.annotations
    }
    result = collective_sentiment(sample_report.annotations, scores, "sample")
    # hand sum of the seven algorithmic scores, divided by 7
    exact = (
        Fraction("-0.34375") + Fraction("0.5") + Fraction("-0.75") + Fraction("0.75")
        + Fraction(-1, 6) + Fraction("-0.625") + Fraction("-0.3125")
    ) / 7
    assert exact == Fraction(-13, 96)
    assert result.weighted_score == float(exact)
    assert result.verdict is Verdict.NEGATIVE
    assert all(t.weight == 1 / 7 for t in result.terms)


def test_single_positive():
    result = collective_sentiment([ann("a")], {"a": fixed("a", 0.75)}, "D")
    assert result.weighted_score == 0.75 and result.verdict is Verdict.POSITIVE


def test_contradicting_meta_excluded():
    anns = [ann("p"), ann("m", parent="p")]
    scores = {"p": fixed("p", 0.75), "m": fixed("m", -0.5)}
    result = collective_sentiment(anns, scores, "D")
    terms = {t.annotation_id: t for t in result.terms}
    assert terms["m"].excluded and terms["m"].exclusion_reason == CONTRADICTS_PARENT
    assert terms["p"].meta_count == 1
    assert result.weighted_score == 0.75 and result.verdict is Verdict.POSITIVE


def test_zero_meta_is_never_excluded():
    anns = [ann("p"), ann("m", parent="p")]
    result = collective_sentiment(anns, {"p": fixed("p", 0.5), "m": fixed("m", 0.0)}, "D")
    assert not any(t.excluded for t in result.terms)


def test_agreeing_meta_counts():
    anns = [ann("p"), ann("m", parent="p")]
    result = collective_sentiment(anns, {"p": fixed("p", 0.5), "m": fixed("m", 0.25)}, "D")
    # p: 0.5 * 2/2, m: 0.25 * 1/2
    assert result.weighted_score == 0.5 + 0.125


def test_exclusion_uses_original_parent_score():
    anns = [ann("r"), ann("p", parent="r"), ann("m", parent="p")]
    scores = {"r": fixed("r", 0.5), "p": fixed("p", -0.5), "m": fixed("m", 0.25)}
    terms = {t.annotation_id: t for t in collective_sentiment(anns, scores, "D").terms}
    assert terms["p"].excluded and terms["m"].excluded


def test_literal_mode_zeroes_leaves():
    anns = [ann("p"), ann("q"), ann("m", parent="p")]
    scores = {"p": fixed("p", 0.5), "q": fixed("q", -1.0), "m": fixed("m", 0.25)}
    result = collective_sentiment(anns, scores, "D", Mode.LITERAL)
    # only p has a meta-annotation: 0.5 * 1/3
    assert result.weighted_score == float(Fraction(1, 2) * Fraction(1, 3))


def test_missing_score():
    with pytest.raises(MissingScore):
        collective_sentiment([ann("a")], {}, "D")


def test_marks_not_scored_by_default():
    anns = [ann("c"), ann("h", kind=K.HIGHLIGHT, body="bad")]
    result = collective_sentiment(anns, {"c": fixed("c", 0.5)}, "D")
    assert [t.annotation_id for t in result.terms] == ["c"]
    assert result.counts.total == 2


def test_score_spans_and_n_includes_marks():
    anns = [ann("c"), ann("h", kind=K.HIGHLIGHT)]
    scores = {"c": fixed("c", 0.5), "h": fixed("h", -0.25)}
    spans = collective_sentiment(anns, scores, "D", score_spans=True)
    assert spans.weighted_score == (0.5 - 0.25) / 2
    wide = collective_sentiment(anns, scores, "D", n_includes_marks=True)
    assert wide.weighted_score == 0.25


def test_unknown_and_help_kinds_not_scored():
    anns = [ann("c"), ann("u", kind=K.UNKNOWN), ann("hp", kind=K.HELP)]
    result = collective_sentiment(anns, {"c": fixed("c", 0.5)}, "D")
    assert [t.annotation_id for t in result.terms] == ["c"]


def test_no_scoreable_annotations_is_objective():
    result = collective_sentiment([ann("h", kind=K.HIGHLIGHT)], {}, "D")
    assert result.weighted_score == 0 and result.verdict is Verdict.OBJECTIVE


@pytest.mark.parametrize(
    "score, verdict",
    [(1e-3, Verdict.POSITIVE), (-1e-3, Verdict.NEGATIVE), (1e-10, Verdict.OBJECTIVE), (0.0, Verdict.OBJECTIVE)],
)
def test_classify(score, verdict):
    assert classify(score, 1e-9) is verdict


def test_to_dict_round_trip(sample_report, lexicon):
    from annosent.aggregate import DocumentSentiment

    scores = {a.annotation_id: score_annotation(a.body, lexicon) for a in sample_report.annotations}
    result = collective_sentiment(sample_report.annotations, scores, "sample")
    assert DocumentSentiment.from_dict(result.to_dict()) == result
