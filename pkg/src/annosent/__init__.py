"""Annotation knowledge base with lexicon-based sentiment scoring.

Comments on a document are scored word by word against a polarity lexicon
(with negation swapping), averaged per annotation, and combined into a
weighted collective verdict for the document.
"""

from annosent.aggregate import (
    AnnotationCounts,
    DocumentSentiment,
    Mode,
    Verdict,
    collective_sentiment,
    count_annotations,
)
from annosent.lexicon import Lexicon, LexiconEntry, PosCategory, load_lexicon, lookup, seed_lexicon
from annosent.model import (
    Annotation,
    AnnotationKind,
    DocumentRecord,
    OnAnnotation,
    OnDocument,
    validate_graph,
)
from annosent.scoring import AnnotationScore, apply_negation, score_annotation, signed_max_polarity
from annosent.textprep import extract_sentiment_words, tokenize

__version__ = "0.1.0"
