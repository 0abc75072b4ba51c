"""Comment text -> ordered, negation-marked sentiment words."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional, Union

from annosent.errors import StoplistContainsNegation
from annosent.lexicon import Lexicon, LexiconEntry

NEGATION_WORDS = frozenset({"not", "never"})

# tried in this order; the remainder must keep at least MIN_STEM characters
SUFFIXES = ("ing", "ed", "es", "s", "ly")
MIN_STEM = 3

_WORD_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class Token:
    surface: str
    position: int


@dataclass(frozen=True)
class SentimentWord:
    token: Token
    entry: LexiconEntry
    negated: bool = False


def tokenize(text: str) -> list[Token]:
    return [Token(w, i) for i, w in enumerate(_WORD_RE.findall(text.lower()))]


def check_stoplist(stoplist: Iterable[str]) -> frozenset:
    words = frozenset(stoplist)
    clash = words & NEGATION_WORDS
    if clash:
        raise StoplistContainsNegation(f"stoplist contains negation word(s): {', '.join(sorted(clash))}")
    return words


def parse_stoplist(text: str) -> frozenset:
    """One lowercase word per line; ``#`` starts a comment line."""
    words = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line.lower())
    return check_stoplist(words)


def load_stoplist(path: Union[str, os.PathLike]) -> frozenset:
    with open(path, encoding="utf-8") as fh:
        return parse_stoplist(fh.read())


def default_stoplist() -> frozenset:
    return parse_stoplist(resources.files("annosent.data").joinpath("stoplist.txt").read_text("utf-8"))


DEFAULT_STOPLIST = default_stoplist()


def remove_stopwords(tokens: Iterable[Token], stoplist: Iterable[str]) -> list[Token]:
    stop = check_stoplist(stoplist)
    return [t for t in tokens if t.surface not in stop]


def resolve(token: Token, lexicon: Lexicon) -> Optional[LexiconEntry]:
    """Look the token up as-is, then after stripping one common suffix."""
    surface = token.surface
    entry = lexicon.lookup(surface)
    if entry is not None:
        return entry
    for suffix in SUFFIXES:
        if surface.endswith(suffix) and len(surface) - len(suffix) >= MIN_STEM:
            entry = lexicon.lookup(surface[: -len(suffix)])
            if entry is not None:
                return entry
    return None


def extract_sentiment_words(
    text: str, lexicon: Lexicon, stoplist: Iterable[str] = DEFAULT_STOPLIST
) -> list[SentimentWord]:
    """Run tokenize -> stop-word removal -> lexicon resolution.

    A negation word flips the next resolved non-negation word, whether or not
    the negation word itself is in the lexicon. Consecutive negations compose,
    so "not not good" leaves "good" unflipped.
    """
    words = []
    pending = False
    for token in remove_stopwords(tokenize(text), stoplist):
        is_negation = token.surface in NEGATION_WORDS
        entry = resolve(token, lexicon)
        if is_negation:
            if entry is not None:
                words.append(SentimentWord(token, entry, negated=False))
            pending = not pending
        elif entry is not None:
            words.append(SentimentWord(token, entry, negated=pending))
            pending = False
    return words
