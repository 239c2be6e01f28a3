import pytest
from hypothesis import given
from hypothesis import strategies as st

from polnet.corpus import (
    PreprocessConfig,
    RawDocument,
    TokenStream,
    concat_documents,
    decode_utf8,
    load_stopwords,
    raw_token_count,
    read_corpus,
    read_document,
    tokenize,
    top_terms,
    vocab_report,
)
from polnet.exceptions import DecodingError, ValidationError


def test_tokenize_strips_case_numbers_and_punctuation():
    cfg = PreprocessConfig(stopwords={"el", "de"})
    s = tokenize(RawDocument("d", "El Camino de 2024, ¡la PAZ!"), cfg)
    assert s.tokens == ("camino", "la", "paz")
    assert s.doc_id == "d"
    assert s.raw_count == 6


def test_punctuation_splits_words():
    assert tokenize("paz,justicia;orden").tokens == ("paz", "justicia", "orden")


def test_spanish_letters_kept_by_default():
    assert tokenize("Educación NIÑOS Pingüino").tokens == ("educación", "niños", "pingüino")


def test_ascii_fold_policy_folds_text_and_stopwords():
    cfg = PreprocessConfig(stopwords={"según"}, unicode_policy="ascii-fold")
    assert tokenize("Según la nación", cfg).tokens == ("la", "nacion")


def test_numbers_and_punctuation_can_be_kept():
    cfg = PreprocessConfig(strip_numbers=False)
    assert tokenize("ley 100 de 1993", cfg).tokens == ("ley", "100", "de", "1993")
    cfg = PreprocessConfig(strip_punctuation=False)
    assert tokenize("¿paz? sí.", cfg).tokens == ("paz?", "sí.")


def test_lowercase_off_still_matches_stopwords_case_insensitively():
    cfg = PreprocessConfig(stopwords={"la"}, lowercase=False)
    assert tokenize("La Paz", cfg).tokens == ("Paz",)


def test_config_validation():
    with pytest.raises(ValidationError):
        PreprocessConfig(stopwords={"La"})
    with pytest.raises(ValidationError):
        PreprocessConfig(unicode_policy="latin1")
    with pytest.raises(ValidationError):
        RawDocument("", "text")


def test_raw_token_count_is_whitespace_split():
    assert raw_token_count("  uno  dos\ttres\n") == 3
    assert raw_token_count("") == 0


def test_decode_reports_byte_offset():
    assert decode_utf8("paz".encode()) == "paz"
    with pytest.raises(DecodingError, match="byte offset 3") as info:
        decode_utf8(b"paz\xff", "doc.txt")
    assert info.value.offset == 3
    assert "doc.txt" in str(info.value)


def test_read_corpus_sorted_with_stem_ids(tmp_path):
    (tmp_path / "b.txt").write_text("dos", encoding="utf-8")
    (tmp_path / "a.txt").write_text("uno", encoding="utf-8")
    (tmp_path / "notes.md").write_text("ignored", encoding="utf-8")
    docs = read_corpus(tmp_path)
    assert [d.id for d in docs] == ["a", "b"]
    assert read_document(tmp_path / "a.txt") == RawDocument("a", "uno")
    assert read_corpus(tmp_path / "missing") == []


def test_concat_documents_keeps_boundary():
    merged = concat_documents([RawDocument("u1", "paz final"), RawDocument("u2", "inicio guerra")], "u")
    assert merged.id == "u"
    assert tokenize(merged).tokens == ("paz", "final", "inicio", "guerra")


def test_load_stopwords(tmp_path):
    p = tmp_path / "sw.txt"
    p.write_text("# comment\nEl\n\n  la  \nDE # trailing\n", encoding="utf-8")
    assert load_stopwords(p) == frozenset({"el", "la", "de"})


def test_vocab_report_fixture(fixtures):
    cfg = PreprocessConfig(stopwords=load_stopwords(fixtures / "stopwords.txt"))
    streams = [tokenize(d, cfg) for d in read_corpus(fixtures / "corpus")]
    report = vocab_report(streams)
    rows = {r.doc_id: r for r in report.rows}
    assert (rows["alfa"].raw_token_count, rows["alfa"].retained_token_count, rows["alfa"].distinct_count) == (12, 6, 5)
    assert rows["beta"].distinct_fraction == 7 / 8
    assert rows["gamma"].distinct_fraction == 10 / 11
    assert rows["delta"].distinct_fraction == 6 / 7
    # 19 distinct terms over the corpus, one of them in every document
    assert report.shared_terms == frozenset({"pueblo"})
    assert report.shared_fraction == 1 / 19
    assert report.as_dict()["shared_fraction_denominator"] == "union of distinct terms"


def test_vocab_report_edge_cases():
    with pytest.raises(ValidationError):
        vocab_report([TokenStream("a", ()), TokenStream("a", ())])
    report = vocab_report([TokenStream("a", ())])
    assert report.rows[0].distinct_fraction == 0.0
    assert report.shared_fraction == 0.0


def test_top_terms_orders_by_frequency_then_term():
    s = TokenStream("d", ("b", "a", "c", "a", "b", "d"))
    assert top_terms(s, 3) == [("a", 2), ("b", 2), ("c", 1)]
    with pytest.raises(ValidationError):
        top_terms(s, 0)


words = st.text(alphabet="abcñá XYZ,.;19", min_size=0, max_size=60)


@given(words, st.sets(st.sampled_from(["a", "b", "ña", "xy"])))
def test_tokens_are_lowercase_and_free_of_stopwords(text, stop):
    s = tokenize(text, PreprocessConfig(stopwords=stop))
    assert all(t == t.lower() and t not in stop and t for t in s.tokens)
    assert all(not any(ch.isdigit() for ch in t) for t in s.tokens)


@given(words)
def test_tokenize_is_idempotent(text):
    once = tokenize(text).tokens
    assert tokenize(" ".join(once)).tokens == once
