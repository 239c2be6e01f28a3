"""Document ingestion, preprocessing and vocabulary statistics.

Documents are reduced to ordered token streams: lowercase, strip numbers and
punctuation, drop symbols outside the Spanish alphabet, remove stop-words.
No stemming or lemmatization is applied, so gendered and plural forms
("colombianos" / "colombianas") stay distinct.
"""

from __future__ import annotations

import re
import string
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .exceptions import DecodingError, ValidationError

__all__ = [
    "RawDocument",
    "PreprocessConfig",
    "TokenStream",
    "VocabRow",
    "VocabReport",
    "decode_utf8",
    "read_document",
    "read_corpus",
    "concat_documents",
    "load_stopwords",
    "raw_token_count",
    "tokenize",
    "vocab_report",
    "top_terms",
]

UNICODE_POLICIES = ("keep-spanish-letters", "ascii-fold")

# Non-ASCII characters retained under the default policy.
SPANISH_LETTERS = "áéíóúüñÁÉÍÓÚÜÑ"

_ASCII_LETTERS = string.ascii_letters
_DIGITS = string.digits


@dataclass(frozen=True)
class RawDocument:
    id: str
    text: str

    def __post_init__(self):
        if not self.id:
            raise ValidationError("document id must be nonempty")


@dataclass(frozen=True)
class PreprocessConfig:
    stopwords: frozenset = frozenset()
    strip_numbers: bool = True
    strip_punctuation: bool = True
    lowercase: bool = True
    unicode_policy: str = "keep-spanish-letters"

    def __post_init__(self):
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))
        if self.unicode_policy not in UNICODE_POLICIES:
            raise ValidationError(
                f"unicode_policy must be one of {UNICODE_POLICIES}, got {self.unicode_policy!r}"
            )
        upper = sorted(w for w in self.stopwords if w != w.lower())
        if upper:
            raise ValidationError(f"stopwords must be lowercase: {upper[:5]}")

    @cached_property
    def _stop_forms(self):
        # stop-words pass through the same unicode policy as the text
        return frozenset(_apply_unicode_policy(w, self.unicode_policy).strip() for w in self.stopwords)

    @cached_property
    def _token_re(self):
        allowed = _ASCII_LETTERS + SPANISH_LETTERS
        if not self.strip_numbers:
            allowed += _DIGITS
        if not self.strip_punctuation:
            allowed += string.punctuation
        return re.compile("[" + re.escape(allowed) + "]+")


@dataclass(frozen=True)
class TokenStream:
    doc_id: str
    tokens: tuple
    raw_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class VocabRow:
    doc_id: str
    raw_token_count: int
    retained_token_count: int
    distinct_count: int
    distinct_fraction: float


@dataclass(frozen=True)
class VocabReport:
    rows: tuple
    shared_fraction: float
    shared_terms: frozenset = field(default_factory=frozenset)
    # The source figure does not define its denominator; ours is the union.
    shared_fraction_denominator: str = "union of distinct terms"

    def as_dict(self):
        return {
            "documents": [vars(r).copy() for r in self.rows],
            "shared_fraction": self.shared_fraction,
            "shared_fraction_denominator": self.shared_fraction_denominator,
            "shared_terms": sorted(self.shared_terms),
        }


def decode_utf8(data: bytes, source=None) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodingError(exc.start, source) from None


def read_document(path) -> RawDocument:
    path = Path(path)
    return RawDocument(path.stem, decode_utf8(path.read_bytes(), str(path)))


def read_corpus(directory, pattern="*.txt") -> list[RawDocument]:
    """Read every matching file in ``directory``, sorted by document id."""
    paths = sorted(Path(directory).glob(pattern), key=lambda p: (p.stem, p.name))
    docs = [read_document(p) for p in paths if p.is_file()]
    _check_unique([d.id for d in docs])
    return docs


def concat_documents(docs: Sequence[RawDocument], doc_id: str) -> RawDocument:
    """Merge several documents into one (e.g. two speeches by the same author)."""
    return RawDocument(doc_id, "\n".join(d.text for d in docs))


def load_stopwords(path) -> frozenset:
    """One term per line; ``#`` starts a comment. Terms are lowercased."""
    path = Path(path)
    text = decode_utf8(path.read_bytes(), str(path))
    terms = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            terms.add(unicodedata.normalize("NFC", line).lower())
    return frozenset(terms)


def raw_token_count(text: str) -> int:
    """Whitespace-delimited words before any filtering."""
    return len(text.split())


def _apply_unicode_policy(text, policy):
    if policy == "ascii-fold":
        text = unicodedata.normalize("NFKD", text)
        text = "".join(c for c in text if not unicodedata.combining(c))
        return "".join(c if c.isascii() else " " for c in text)
    text = unicodedata.normalize("NFC", text)
    return "".join(c if c.isascii() or c in SPANISH_LETTERS else " " for c in text)


def tokenize(doc: RawDocument | str, cfg: PreprocessConfig | None = None) -> TokenStream:
    """Turn a document into its ordered stream of retained terms.

    Disallowed characters (digits, punctuation, non-Spanish symbols) act as
    separators, so ``"paz,"`` yields ``paz`` and ``"2022."`` yields nothing.
    """
    cfg = cfg or PreprocessConfig()
    if isinstance(doc, str):
        doc = RawDocument("doc", doc)
    if isinstance(doc.text, bytes):
        text = decode_utf8(doc.text, doc.id)
    else:
        text = doc.text
    raw = raw_token_count(text)
    if cfg.lowercase:
        text = text.lower()
    text = _apply_unicode_policy(text, cfg.unicode_policy)
    stop = cfg._stop_forms
    tokens = [t for t in cfg._token_re.findall(text) if t.lower() not in stop]
    return TokenStream(doc.id, tokens, raw)


def _check_unique(ids):
    seen = set()
    for i in ids:
        if i in seen:
            raise ValidationError(f"duplicate document id {i!r}")
        seen.add(i)


def vocab_report(
    streams: Sequence[TokenStream], raw_counts: Mapping[str, int] | None = None
) -> VocabReport:
    if not streams:
        raise ValidationError("vocab_report needs at least one token stream")
    _check_unique([s.doc_id for s in streams])
    rows = []
    sets = []
    for s in streams:
        raw = raw_counts[s.doc_id] if raw_counts is not None else s.raw_count
        distinct = set(s.tokens)
        sets.append(distinct)
        n = len(s.tokens)
        rows.append(VocabRow(s.doc_id, raw, n, len(distinct), len(distinct) / n if n else 0.0))
    union = set().union(*sets)
    shared = set.intersection(*sets)
    frac = len(shared) / len(union) if union else 0.0
    return VocabReport(tuple(rows), frac, frozenset(shared))


def _tokens(stream):
    return stream.tokens if isinstance(stream, TokenStream) else tuple(stream)


def top_terms(stream: TokenStream | Iterable[str], n: int = 25) -> list[tuple[str, int]]:
    """Most frequent terms, ties broken alphabetically."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    counts = Counter(_tokens(stream))
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:n]
