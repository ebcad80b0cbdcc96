import pytest
from hypothesis import given, strategies as st

from parallelqa.textproc import (
    RawDocument,
    normalize_answer,
    split_sentences,
    tokenize,
)


class TestTokenize:
    def test_empty(self):
        assert tokenize("").tokens == ()

    def test_offsets(self):
        t = tokenize("Banda ran for president.")
        assert [(tok.surface, tok.start, tok.end) for tok in t.tokens] == [
            ("Banda", 0, 5),
            ("ran", 6, 9),
            ("for", 10, 13),
            ("president", 14, 23),
        ]

    def test_hyphen_separates(self):
        assert [t.surface for t in tokenize("7-6 7-6 victory").tokens] == [
            "7", "6", "7", "6", "victory",
        ]

    def test_word_internal_apostrophe(self):
        t = tokenize("Queen's Club")
        assert t.folded == ("queen's", "club")

    def test_quoted_word_keeps_no_outer_apostrophe(self):
        assert [t.surface for t in tokenize("'hello'").tokens] == ["hello"]

    def test_underscore_separates(self):
        assert [t.surface for t in tokenize("a_b").tokens] == ["a", "b"]

    @given(st.text(max_size=200))
    def test_round_trip(self, text):
        t = tokenize(text)
        for tok in t.tokens:
            assert text[tok.start : tok.end] == tok.surface

    @given(st.text(max_size=200))
    def test_offsets_strictly_increasing(self, text):
        t = tokenize(text)
        prev_end = -1
        for tok in t.tokens:
            assert prev_end <= tok.start < tok.end
            prev_end = tok.end

    def test_deterministic(self):
        text = "Some text, with 7-6 numbers and Names."
        assert tokenize(text) == tokenize(text)


class TestSplitSentences:
    def test_single_sentence(self):
        text = "He died in South Africa in 1997."
        spans = split_sentences(text)
        assert len(spans) == 1
        assert (spans[0].char_start, spans[0].char_end) == (0, len(text))

    def test_two_sentences(self):
        text = "Let talks begin. He added more."
        spans = split_sentences(text)
        assert [text[s.char_start : s.char_end] for s in spans] == [
            "Let talks begin.",
            "He added more.",
        ]

    def test_abbreviation_does_not_split(self):
        text = "Dr. Banda won. He left."
        spans = split_sentences(text)
        assert [text[s.char_start : s.char_end] for s in spans] == [
            "Dr. Banda won.",
            "He left.",
        ]

    def test_us_abbreviation(self):
        text = 'U.S. Olympic Committee "Sportsman of the Year" in 1997. He was the first.'
        spans = split_sentences(text)
        assert len(spans) == 2
        assert text[spans[0].char_start : spans[0].char_end].startswith("U.S. Olympic")

    def test_quote_after_terminator(self):
        text = 'It should be "free and fair." Meanwhile, others spoke.'
        spans = split_sentences(text)
        assert [text[s.char_start : s.char_end] for s in spans] == [
            'It should be "free and fair."',
            "Meanwhile, others spoke.",
        ]

    def test_lowercase_after_period_no_split(self):
        spans = split_sentences("He lost to Martin vs. the field.")
        assert len(spans) == 1

    def test_no_terminator(self):
        spans = split_sentences("no terminator here")
        assert len(spans) == 1

    def test_empty_and_whitespace(self):
        assert split_sentences("") == []
        assert split_sentences("   \n\t ") == []

    def test_digit_starts_sentence(self):
        text = "Prices fell. 20,000 people came."
        assert len(split_sentences(text)) == 2

    @given(st.text(max_size=300))
    def test_spans_cover_non_whitespace(self, text):
        spans = split_sentences(text)
        covered = set()
        prev_end = -1
        for s in spans:
            assert s.char_start >= prev_end
            assert s.char_start < s.char_end <= len(text)
            assert not text[s.char_start].isspace()
            assert not text[s.char_end - 1].isspace()
            covered.update(range(s.char_start, s.char_end))
            prev_end = s.char_end
        for i, ch in enumerate(text):
            if not ch.isspace():
                assert i in covered

    @given(st.text(max_size=300))
    def test_indices_sequential(self, text):
        spans = split_sentences(text)
        assert [s.index for s in spans] == list(range(len(spans)))


class TestNormalizeAnswer:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("The UDF", "udf"),
            ("udf", "udf"),
            ("United Democratic Front (UDF)", "united democratic front udf"),
            ("  a  white   flag  ", "white flag"),
            ("7-6 7-6", "76 76"),
            ("", ""),
            ("the", ""),
        ],
    )
    def test_examples(self, raw, expected):
        assert normalize_answer(raw) == expected

    @given(st.text(max_size=200))
    def test_idempotent(self, text):
        once = normalize_answer(text)
        assert normalize_answer(once) == once


class TestRawDocument:
    def test_rejects_empty_id(self):
        with pytest.raises(ValueError):
            RawDocument(id="", source="news", title="", text="x")

    def test_rejects_empty_text(self):
        with pytest.raises(ValueError):
            RawDocument(id="d", source="news", title="", text="")

    def test_rejects_unknown_source(self):
        with pytest.raises(ValueError):
            RawDocument(id="d", source="blog", title="", text="x")
