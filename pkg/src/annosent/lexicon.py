"""Polarity lexicons: SentiWordNet 3.0 TSV and a small four-column format."""

from __future__ import annotations

import enum
import io
import logging
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import BinaryIO, Optional, Union

from annosent.errors import DuplicateEntry, MalformedLine, ScoreOutOfRange

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-9


class PosCategory(enum.Enum):
    ADJECTIVE = "a"
    ADVERB = "r"
    VERB = "v"
    NOUN = "n"


# cross-POS lookup preference
POS_PRIORITY = (PosCategory.ADJECTIVE, PosCategory.ADVERB, PosCategory.VERB, PosCategory.NOUN)

_POS_BY_LETTER = {p.value: p for p in PosCategory}


class LexiconFormat(enum.Enum):
    SWN3 = "swn3"
    MINI = "mini"


@dataclass(frozen=True)
class LexiconEntry:
    lemma: str
    pos: PosCategory
    positivity: float
    negativity: float
    objectivity: float
    sense_rank: int = 1

    @property
    def triple(self) -> tuple[float, float, float]:
        return (self.positivity, self.negativity, self.objectivity)


@dataclass(frozen=True)
class Lexicon:
    entries: dict = field(default_factory=dict)  # (lemma, PosCategory) -> LexiconEntry
    source_description: str = ""

    def __len__(self):
        return len(self.entries)

    def lookup(self, token: str) -> Optional[LexiconEntry]:
        for pos in POS_PRIORITY:
            entry = self.entries.get((token, pos))
            if entry is not None:
                return entry
        return None


def lookup(lexicon: Lexicon, token: str) -> Optional[LexiconEntry]:
    """Return the entry for ``token`` under the highest-priority POS, or None."""
    return lexicon.lookup(token)


def _score(text: str, line_no: int, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MalformedLine(line_no, f"{name} score {text!r} is not a number") from None
    if not 0.0 <= value <= 1.0:
        raise ScoreOutOfRange(f"line {line_no}: {name} score {value} outside [0, 1]")
    return value


def _objectivity(pos: float, neg: float, line_no: int) -> float:
    obj = 1.0 - pos - neg
    if obj < 0.0:
        if obj < -SUM_TOLERANCE:
            raise ScoreOutOfRange(
                f"line {line_no}: positivity + negativity = {pos + neg} exceeds 1"
            )
        obj = 0.0
    return obj


def _lines(data: bytes):
    text = data.decode("utf-8")
    if text.startswith("﻿"):
        text = text[1:]
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield line_no, line


def _parse_swn3(data: bytes) -> dict:
    selected: dict = {}
    for line_no, line in _lines(data):
        cols = line.split("\t")
        if len(cols) < 5:
            raise MalformedLine(line_no, f"expected at least 5 tab-separated fields, got {len(cols)}")
        letter, _synset_id, pos_s, neg_s, terms = cols[:5]
        pos_cat = _POS_BY_LETTER.get(letter.strip())
        if pos_cat is None:
            continue
        pos = _score(pos_s, line_no, "positivity")
        neg = _score(neg_s, line_no, "negativity")
        obj = _objectivity(pos, neg, line_no)
        for term in terms.split():
            lemma, sep, rank_s = term.rpartition("#")
            if not sep or not lemma:
                raise MalformedLine(line_no, f"synset term {term!r} lacks '#rank'")
            try:
                rank = int(rank_s)
            except ValueError:
                raise MalformedLine(line_no, f"sense rank {rank_s!r} is not an integer") from None
            if rank < 1:
                raise MalformedLine(line_no, f"sense rank {rank} must be positive")
            key = (lemma.lower(), pos_cat)
            current = selected.get(key)
            if current is None or rank < current.sense_rank:
                selected[key] = LexiconEntry(key[0], pos_cat, pos, neg, obj, rank)
    return selected


def _parse_mini(data: bytes) -> dict:
    entries: dict = {}
    for line_no, line in _lines(data):
        cols = line.split("\t")
        if len(cols) != 4:
            raise MalformedLine(line_no, f"expected 4 tab-separated fields, got {len(cols)}")
        lemma, letter, pos_s, neg_s = (c.strip() for c in cols)
        if not lemma:
            raise MalformedLine(line_no, "empty lemma")
        pos_cat = _POS_BY_LETTER.get(letter)
        if pos_cat is None:
            continue
        pos = _score(pos_s, line_no, "positivity")
        neg = _score(neg_s, line_no, "negativity")
        key = (lemma.lower(), pos_cat)
        if key in entries:
            raise DuplicateEntry(f"line {line_no}: duplicate entry {lemma}/{letter}")
        entries[key] = LexiconEntry(key[0], pos_cat, pos, neg, _objectivity(pos, neg, line_no))
    return entries


def load_lexicon(
    source: Union[bytes, BinaryIO],
    format: Union[LexiconFormat, str] = LexiconFormat.MINI,
    source_description: str = "",
) -> Lexicon:
    """Load a lexicon from raw bytes or a binary stream.

    SWN3 rows yield one candidate per ``lemma#rank`` synset term and the lowest
    rank wins for each (lemma, POS). Mini rows are ``lemma, pos, pos_score,
    neg_score``; objectivity is whatever is left over.
    """
    fmt = LexiconFormat(format)
    data = source if isinstance(source, (bytes, bytearray)) else source.read()
    parser = _parse_swn3 if fmt is LexiconFormat.SWN3 else _parse_mini
    entries = parser(bytes(data))
    logger.debug("loaded %d lexicon entries (%s)", len(entries), fmt.value)
    return Lexicon(entries, source_description or fmt.value)


def load_lexicon_file(path: Union[str, os.PathLike], format="mini") -> Lexicon:
    with open(path, "rb") as fh:
        return load_lexicon(fh, format, source_description=f"{LexiconFormat(format).value}:{os.fspath(path)}")


def seed_lexicon() -> Lexicon:
    """The seven-word lexicon used in the worked example (quite, well, not, ...)."""
    data = resources.files("annosent.data").joinpath("seed_lexicon.tsv").read_bytes()
    return load_lexicon(io.BytesIO(data), LexiconFormat.MINI, source_description="mini:seed")
