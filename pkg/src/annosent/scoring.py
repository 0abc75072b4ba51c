"""Per-word signed polarity and the per-annotation average sentiment score."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from annosent.errors import ScoreOutOfRange
from annosent.lexicon import Lexicon, LexiconEntry
from annosent.textprep import DEFAULT_STOPLIST, extract_sentiment_words

Triple = tuple[float, float, float]


@dataclass(frozen=True)
class SignedWordScore:
    token: str
    positivity: float
    negativity: float
    objectivity: float
    signed_max: float
    negated: bool = False
    lemma: str = ""
    pos: str = ""


@dataclass(frozen=True)
class AnnotationScore:
    annotation_id: Optional[str]
    words: tuple[SignedWordScore, ...]
    sentiment_score: float

    @property
    def word_count(self) -> int:
        return len(self.words)

    @property
    def no_sentiment_words(self) -> bool:
        return not self.words


def apply_negation(entry: Union[LexiconEntry, Triple]) -> Triple:
    """Swap positivity and negativity; objectivity is untouched."""
    pos, neg, obj = entry.triple if isinstance(entry, LexiconEntry) else entry
    return (neg, pos, obj)


def signed_max_polarity(triple: Triple) -> float:
    """Largest of the three scores, negative only if negativity strictly dominates.

    Ties resolve in favour of positivity, then objectivity.
    """
    pos, neg, obj = triple
    for name, value in zip(("positivity", "negativity", "objectivity"), triple):
        if not 0.0 <= value <= 1.0:
            raise ScoreOutOfRange(f"{name} {value} outside [0, 1]")
    if neg > pos and neg > obj:
        return -neg
    return max(pos, obj)


def objective_dominant(triple: Triple) -> bool:
    pos, neg, obj = triple
    return obj > pos and obj > neg


def score_annotation(
    body: str,
    lexicon: Lexicon,
    stoplist: Iterable[str] = DEFAULT_STOPLIST,
    *,
    annotation_id: Optional[str] = None,
    drop_objective: bool = False,
) -> AnnotationScore:
    """Average signed max polarity over the sentiment words of ``body``.

    An empty extraction scores 0 and reports ``no_sentiment_words``.
    """
    scored = []
    for word in extract_sentiment_words(body, lexicon, stoplist):
        triple = apply_negation(word.entry) if word.negated else word.entry.triple
        if drop_objective and objective_dominant(triple):
            continue
        scored.append(
            SignedWordScore(
                token=word.token.surface,
                positivity=triple[0],
                negativity=triple[1],
                objectivity=triple[2],
                signed_max=signed_max_polarity(triple),
                negated=word.negated,
                lemma=word.entry.lemma,
                pos=word.entry.pos.value,
            )
        )
    if not scored:
        return AnnotationScore(annotation_id, (), 0.0)
    mean = math.fsum(w.signed_max for w in scored) / len(scored)
    return AnnotationScore(annotation_id, tuple(scored), mean)
