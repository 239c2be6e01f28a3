"""Weighted word co-occurrence graphs from bigrams and one-skip grams."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, NamedTuple, Sequence

import networkx as nx

from .corpus import TokenStream
from .exceptions import ValidationError

__all__ = [
    "NGramPair",
    "extract_bigrams",
    "extract_skipgrams",
    "build_graph",
    "giant_component",
    "word_graph",
]


class NGramPair(NamedTuple):
    u: str
    v: str
    kind: str  # "bigram" or "skipgram"


def _tokens(stream):
    return stream.tokens if isinstance(stream, TokenStream) else tuple(stream)


def _pairs_at(tokens, gap, kind):
    return [NGramPair(tokens[i], tokens[i + gap], kind) for i in range(len(tokens) - gap)]


def extract_bigrams(stream: TokenStream | Sequence[str]) -> list[NGramPair]:
    """Adjacent token pairs, in positional order."""
    return _pairs_at(_tokens(stream), 1, "bigram")


def extract_skipgrams(stream: TokenStream | Sequence[str]) -> list[NGramPair]:
    """Pairs separated by exactly one intervening token."""
    return _pairs_at(_tokens(stream), 2, "skipgram")


def _label_key(v):
    return str(v)


def build_graph(pairs: Iterable[NGramPair | tuple], min_weight: int = 1) -> nx.Graph:
    """Collapse pairs into a simple undirected graph weighted by frequency.

    Direction is ignored, self-pairs are dropped, and edges lighter than
    ``min_weight`` are removed together with the vertices they leave isolated.
    Nodes and edges are inserted in sorted order so exports are reproducible.
    """
    if min_weight < 1:
        raise ValidationError("min_weight must be >= 1")
    counts = Counter()
    for p in pairs:
        u, v = p[0], p[1]
        if u == v:
            continue
        key = (u, v) if _label_key(u) <= _label_key(v) else (v, u)
        counts[key] += 1
    kept = sorted(
        ((u, v, w) for (u, v), w in counts.items() if w >= min_weight),
        key=lambda e: (_label_key(e[0]), _label_key(e[1])),
    )
    g = nx.Graph()
    g.add_nodes_from(sorted({x for u, v, _ in kept for x in (u, v)}, key=_label_key))
    g.add_weighted_edges_from(kept)
    return g


def giant_component(g: nx.Graph) -> nx.Graph:
    """Induced subgraph on the largest connected component.

    Equal-size components are ranked by their smallest vertex label.
    """
    if g.number_of_nodes() == 0:
        return g.copy()
    best = min(
        nx.connected_components(g),
        key=lambda c: (-len(c), min(_label_key(v) for v in c)),
    )
    return g.subgraph([v for v in g if v in best]).copy()


def word_graph(
    stream: TokenStream | Sequence[str], skipgrams: bool = False, min_weight: int = 1
) -> nx.Graph:
    """Bigram graph, or the combined bigram + skip-gram graph with summed weights."""
    pairs = extract_bigrams(stream)
    if skipgrams:
        pairs += extract_skipgrams(stream)
    return build_graph(pairs, min_weight=min_weight)
