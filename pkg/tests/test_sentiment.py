import pytest
from hypothesis import given
from hypothesis import strategies as st

from polnet.corpus import TokenStream
from polnet.exceptions import NoCoverageError, ValidationError
from polnet.sentiment import SentimentLexicon, load_lexicon, score

LEX = SentimentLexicon({"paz": "positive", "guerra": "negative", "reforma": "positive"})


def test_score_counts_hits_with_multiplicity():
    s = TokenStream("d", ("paz", "guerra", "paz", "otro", "reforma"))
    r = score(s, LEX)
    assert (r.positive_pct, r.negative_pct, r.matched_count) == (75.0, 25.0, 4)
    assert r.top_positive == (("paz", 2), ("reforma", 1))
    assert r.top_negative == (("guerra", 1),)


def test_score_distinct_counts_each_term_once():
    s = TokenStream("d", ("paz", "paz", "paz", "guerra"))
    r = score(s, LEX, distinct=True)
    assert (r.positive_pct, r.negative_pct, r.matched_count) == (50.0, 50.0, 2)


def test_score_errors():
    with pytest.raises(NoCoverageError, match="'d'"):
        score(TokenStream("d", ("nada",)), LEX)
    with pytest.raises(ValidationError):
        score(TokenStream("d", ("paz",)), SentimentLexicon({}))


def test_lexicon_validation():
    with pytest.raises(ValidationError):
        SentimentLexicon({"paz": "neutral"})
    with pytest.raises(ValidationError):
        SentimentLexicon({"Paz": "positive"})


def test_load_lexicon(tmp_path, fixtures):
    lex = load_lexicon(fixtures / "lexicon.csv")
    assert lex["paz"] == "positive" and lex["droga"] == "negative" and len(lex) == 9

    bad = tmp_path / "bad.csv"
    bad.write_text("word,label\npaz,positive\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="term,polarity"):
        load_lexicon(bad)

    clash = tmp_path / "clash.csv"
    clash.write_text("term,polarity\npaz,positive\npaz,negative\n", encoding="utf-8")
    with pytest.raises(ValidationError, match=":3"):
        load_lexicon(clash)


def test_fixture_polarity_table(fixtures):
    from polnet.corpus import PreprocessConfig, load_stopwords, read_corpus, tokenize

    cfg = PreprocessConfig(stopwords=load_stopwords(fixtures / "stopwords.txt"))
    lex = load_lexicon(fixtures / "lexicon.csv")
    got = {d.id: score(tokenize(d, cfg), lex) for d in read_corpus(fixtures / "corpus")}
    assert {k: (r.positive_pct, r.negative_pct) for k, r in got.items()} == {
        "alfa": (100.0, 0.0),
        "beta": (20.0, 80.0),
        "gamma": (75.0, 25.0),
        "delta": (100 / 6, 500 / 6),
    }


@given(st.lists(st.sampled_from(["paz", "guerra", "reforma", "x", "y"]), min_size=1, max_size=80), st.booleans())
def test_percentages_sum_to_100(tokens, distinct):
    s = TokenStream("d", tokens)
    if not any(t in LEX for t in tokens):
        with pytest.raises(NoCoverageError):
            score(s, LEX, distinct=distinct)
        return
    r = score(s, LEX, distinct=distinct)
    assert abs(r.positive_pct + r.negative_pct - 100.0) <= 1e-9
    assert 0.0 <= r.positive_pct <= 100.0
