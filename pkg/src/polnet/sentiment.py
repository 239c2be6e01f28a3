"""Lexicon-based polarity scoring of token streams."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .corpus import TokenStream, decode_utf8
from .exceptions import NoCoverageError, ValidationError

__all__ = ["SentimentLexicon", "PolarityReport", "load_lexicon", "score"]

POLARITIES = ("positive", "negative")


class SentimentLexicon(Mapping):
    """Read-only mapping ``term -> "positive" | "negative"``."""

    def __init__(self, entries: Mapping[str, str]):
        clean = {}
        for term, pol in entries.items():
            if pol not in POLARITIES:
                raise ValidationError(f"polarity of {term!r} must be positive/negative, got {pol!r}")
            if term != term.lower():
                raise ValidationError(f"lexicon terms must be lowercase: {term!r}")
            clean[term] = pol
        self._entries = clean

    def __getitem__(self, term):
        return self._entries[term]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def __repr__(self):
        return f"SentimentLexicon({len(self)} terms)"


def load_lexicon(path) -> SentimentLexicon:
    """Read a ``term,polarity`` CSV file.

    A term listed with both polarities is rejected, as are unknown polarity
    labels.
    """
    path = Path(path)
    text = decode_utf8(path.read_bytes(), str(path))
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or {"term", "polarity"} - set(reader.fieldnames):
        raise ValidationError(f"{path}: lexicon header must be 'term,polarity'")
    entries = {}
    for lineno, row in enumerate(reader, start=2):
        term = (row["term"] or "").strip().lower()
        pol = (row["polarity"] or "").strip().lower()
        if not term:
            continue
        if pol not in POLARITIES:
            raise ValidationError(f"{path}:{lineno}: unknown polarity {pol!r}")
        if entries.get(term, pol) != pol:
            raise ValidationError(f"{path}:{lineno}: term {term!r} listed as both polarities")
        entries[term] = pol
    return SentimentLexicon(entries)


@dataclass(frozen=True)
class PolarityReport:
    doc_id: str
    positive_pct: float
    negative_pct: float
    matched_count: int
    top_positive: tuple
    top_negative: tuple

    def as_dict(self):
        return {
            "doc_id": self.doc_id,
            "positive_pct": self.positive_pct,
            "negative_pct": self.negative_pct,
            "matched_count": self.matched_count,
            "top_positive": [list(t) for t in self.top_positive],
            "top_negative": [list(t) for t in self.top_negative],
        }


def _ranked(counter, n):
    return tuple(sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:n])


def score(
    stream: TokenStream,
    lexicon: Mapping[str, str],
    top_n: int = 25,
    distinct: bool = False,
) -> PolarityReport:
    """Share of positive and negative lexicon hits in a stream, in percent.

    Hits are counted with multiplicity unless ``distinct`` is set, in which case
    each matched term counts once.
    """
    if not lexicon:
        raise ValidationError("sentiment lexicon is empty")
    counts = Counter(t for t in stream.tokens if t in lexicon)
    if distinct:
        counts = Counter(dict.fromkeys(counts, 1))
    pos = Counter({t: c for t, c in counts.items() if lexicon[t] == "positive"})
    neg = Counter({t: c for t, c in counts.items() if lexicon[t] == "negative"})
    n_pos, n_neg = sum(pos.values()), sum(neg.values())
    matched = n_pos + n_neg
    if matched == 0:
        raise NoCoverageError(f"no lexicon coverage in document {stream.doc_id!r}")
    pos_pct = 100.0 * n_pos / matched
    return PolarityReport(
        stream.doc_id,
        pos_pct,
        100.0 * n_neg / matched,
        matched,
        _ranked(pos, top_n),
        _ranked(neg, top_n),
    )
