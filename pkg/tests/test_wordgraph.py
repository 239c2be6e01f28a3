import random

import networkx as nx
from hypothesis import given
from hypothesis import strategies as st

import oracles
from polnet.corpus import TokenStream
from polnet.wordgraph import NGramPair, build_graph, extract_bigrams, extract_skipgrams, giant_component, word_graph


def pairs(ps):
    return [(p.u, p.v) for p in ps]


def edges(g):
    return {(u, v, d["weight"]) for u, v, d in g.edges(data=True)}


def test_bigram_examples():
    assert pairs(extract_bigrams(["a", "b", "c"])) == [("a", "b"), ("b", "c")]
    assert extract_bigrams(["a"]) == []
    assert pairs(extract_bigrams(["a", "b", "a", "b"])) == [("a", "b"), ("b", "a"), ("a", "b")]
    assert all(p.kind == "bigram" for p in extract_bigrams(TokenStream("d", ("x", "y"))))


def test_skipgram_examples():
    assert pairs(extract_skipgrams(["a", "b", "c"])) == [("a", "c")]
    assert extract_skipgrams(["a", "b"]) == []
    assert extract_skipgrams(["a", "b", "a"]) == [NGramPair("a", "a", "skipgram")]


def test_build_graph_examples():
    g = build_graph([("a", "b"), ("b", "a"), ("a", "b")], min_weight=2)
    assert edges(g) == {("a", "b", 3)}
    assert build_graph([("a", "b")], min_weight=2).number_of_nodes() == 0
    assert edges(build_graph([("a", "a"), ("a", "b")])) == {("a", "b", 1)}


def test_combined_graph_sums_weights():
    g = word_graph(["a", "b", "a"], skipgrams=True)
    # bigrams a-b twice, the skip-gram a-a is a self-pair
    assert edges(g) == {("a", "b", 2)}
    g = word_graph(["a", "b", "c", "a"], skipgrams=True)
    # bigrams ab, bc, ca and skip-grams ac, ba
    assert edges(g) == {("a", "b", 2), ("b", "c", 1), ("a", "c", 2)}


def test_giant_component_examples():
    g = nx.Graph([("a", "b"), ("c", "d"), ("d", "e")])
    assert set(giant_component(g)) == {"c", "d", "e"}
    tie = nx.Graph([("c", "d"), ("a", "b")])
    assert set(giant_component(tie)) == {"a", "b"}
    assert giant_component(nx.Graph()).number_of_nodes() == 0
    path = nx.path_graph(["x", "y", "z"])
    assert nx.utils.graphs_equal(giant_component(path), path)


token_lists = st.lists(st.sampled_from("abcdefg"), max_size=40)


@given(token_lists)
def test_pair_counts(tokens):
    assert len(extract_bigrams(tokens)) == max(0, len(tokens) - 1)
    assert len(extract_skipgrams(tokens)) == max(0, len(tokens) - 2)


@given(token_lists, st.randoms(use_true_random=False), st.integers(1, 3))
def test_build_graph_ignores_pair_order(tokens, rnd, w):
    ps = extract_bigrams(tokens) + extract_skipgrams(tokens)
    shuffled = list(ps)
    rnd.shuffle(shuffled)
    a, b = build_graph(ps, w), build_graph(shuffled, w)
    assert edges(a) == edges(b) and set(a) == set(b)
    assert all(u != v and d["weight"] >= w for u, v, d in a.edges(data=True))
    assert all(a.degree(v) > 0 for v in a)


@given(token_lists, st.integers(1, 4))
def test_raising_threshold_only_removes(tokens, w):
    ps = extract_bigrams(tokens)
    lo, hi = build_graph(ps, w), build_graph(ps, w + 1)
    assert set(hi) <= set(lo)
    assert {frozenset(e) for e in hi.edges} <= {frozenset(e) for e in lo.edges}


def test_giant_component_against_exhaustive_components():
    for seed in range(200):
        rng = random.Random(seed)
        n = rng.randint(1, 12)
        g = nx.gnp_random_graph(n, rng.uniform(0.05, 0.4), seed=seed)
        adj = oracles.neighbours(n, g.edges())
        comps = []
        seen = set()
        for v in range(n):
            if v not in seen:
                c = set(oracles.bfs(adj, v))
                seen |= c
                comps.append(c)
        best = max(len(c) for c in comps)
        expected = min((c for c in comps if len(c) == best), key=lambda c: min(str(x) for x in c))
        got = giant_component(g)
        assert set(got) == expected
        assert nx.is_connected(got)
