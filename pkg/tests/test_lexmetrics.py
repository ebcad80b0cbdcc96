import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_ranking
from parallelqa.lexmetrics import (
    SparseVector,
    bm25,
    build_corpus_stats,
    cosine,
    jaccard,
    tfidf_vector,
)
from parallelqa.textproc import tokenize

words = st.sampled_from(["who", "won", "match", "banda", "mcp", "udf", "7", "final"])
token_lists = st.lists(words, max_size=12)


def tt(tokens):
    return tokenize(" ".join(tokens))


class TestCorpusStats:
    def test_hand_count(self):
        stats = build_corpus_stats([tt(["a", "b"]), tt(["b", "c"])])
        assert stats.num_docs == 2
        assert stats.doc_freq == {"a": 1, "b": 2, "c": 1}
        assert stats.avg_doc_len == 2.0
        assert stats.total_docs_len == 4

    def test_singleton(self):
        stats = build_corpus_stats([tt(["a"])])
        assert (stats.num_docs, stats.doc_freq, stats.avg_doc_len) == (1, {"a": 1}, 1.0)

    def test_document_frequency_not_term_frequency(self):
        stats = build_corpus_stats([tt(["a", "a", "a"])])
        assert stats.doc_freq == {"a": 1}

    def test_empty_corpus(self):
        with pytest.raises(ValueError, match="empty corpus"):
            build_corpus_stats([])

    def test_case_folded(self):
        stats = build_corpus_stats([tokenize("Banda BANDA"), tokenize("banda")])
        assert stats.doc_freq == {"banda": 2}


class TestJaccard:
    def test_identical(self):
        assert jaccard(tt(["who", "won"]), tt(["won", "who"])) == 1.0

    def test_disjoint(self):
        assert jaccard(tt(["a"]), tt(["b"])) == 0.0

    def test_third(self):
        assert jaccard(tt(["who", "won"]), tt(["won", "match"])) == pytest.approx(1 / 3)

    def test_both_empty(self):
        assert jaccard(tokenize(""), tokenize("")) == 0.0

    @given(token_lists, token_lists)
    def test_symmetric_and_bounded(self, a, b):
        s = jaccard(tt(a), tt(b))
        assert s == jaccard(tt(b), tt(a))
        assert 0.0 <= s <= 1.0


class TestTfidf:
    def test_empty_doc(self):
        stats = build_corpus_stats([tt(["a"])])
        assert tfidf_vector(tokenize(""), stats).entries == {}

    def test_term_in_every_doc_weights_zero(self):
        stats = build_corpus_stats([tt(["a"])])
        assert tfidf_vector(tt(["a"]), stats).entries == {}

    def test_plug_into_formula(self):
        stats = build_corpus_stats([tt(["a", "b"]), tt(["c"]), tt(["d"])])
        vec = tfidf_vector(tt(["a", "a"]), stats)
        assert vec.entries["a"] == pytest.approx(2 * math.log(2))

    def test_unseen_term_df_zero(self):
        stats = build_corpus_stats([tt(["a"])])
        vec = tfidf_vector(tt(["z"]), stats)
        assert vec.entries["z"] == pytest.approx(math.log(2))


class TestCosine:
    def test_identity(self):
        v = SparseVector({"a": 1.2, "b": 0.4})
        assert cosine(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine(SparseVector({"a": 1.0}), SparseVector({"b": 1.0})) == 0.0

    def test_hand_value(self):
        got = cosine(SparseVector({"a": 1.0, "b": 1.0}), SparseVector({"a": 1.0}))
        assert got == pytest.approx(1 / math.sqrt(2))

    def test_zero_norm(self):
        assert cosine(SparseVector({}), SparseVector({"a": 1.0})) == 0.0

    @given(
        st.dictionaries(words, st.floats(0.1, 5), max_size=5),
        st.dictionaries(words, st.floats(0.1, 5), max_size=5),
        st.floats(0.01, 100),
    )
    def test_symmetric_scale_invariant(self, a, b, c):
        va, vb = SparseVector(a), SparseVector(b)
        assert cosine(va, vb) == pytest.approx(cosine(vb, va))
        scaled = SparseVector({k: c * v for k, v in a.items()})
        assert cosine(scaled, vb) == pytest.approx(cosine(va, vb))


class TestBm25:
    def test_no_query_term_in_doc(self):
        stats = build_corpus_stats([tt(["a"]), tt(["b"])])
        assert bm25(tt(["c"]), tt(["a"]), stats) == 0.0

    def test_plug_into_formula(self):
        # Two one-token docs: N=2, df=1, |doc| == avg_doc_len.
        stats = build_corpus_stats([tt(["x"]), tt(["y"])])
        got = bm25(tt(["x"]), tt(["x"]), stats)
        assert got == pytest.approx(math.log(2) * (1 * 2.2) / (1 + 1.2))

    def test_query_count_multiplies_summand(self):
        stats = build_corpus_stats([tt(["x"]), tt(["y"])])
        single = bm25(tt(["x"]), tt(["x"]), stats)
        double = bm25(tt(["x", "x"]), tt(["x"]), stats)
        assert double == pytest.approx(2 * single)

    def test_idf_never_negative(self):
        # df == N is the worst case for the unsmoothed form.
        stats = build_corpus_stats([tt(["x"]), tt(["x"])])
        assert bm25(tt(["x"]), tt(["x"]), stats) > 0.0

    def test_monotone_in_tf(self):
        stats = build_corpus_stats([tt(["x", "y", "z"]), tt(["y", "z"])])
        # Same doc length; replacing a non-query token with the query term
        # raises tf with all else fixed.
        low = bm25(tt(["x"]), tt(["x", "y", "y"]), stats)
        high = bm25(tt(["x"]), tt(["x", "x", "y"]), stats)
        assert high > low

    def test_zero_avg_len_rejected(self):
        stats = build_corpus_stats([tokenize("")])
        with pytest.raises(ValueError):
            bm25(tt(["x"]), tt(["x"]), stats)


class TestOracleAgreement:
    """Sentence rankings must match a brute-force re-scorer exactly."""

    @pytest.mark.parametrize("metric", ["jaccard", "tfidf", "bm25"])
    def test_rankings_match_brute_force(self, metric):
        from parallelqa.datastore import QAExample
        from parallelqa.diagnostics import build_view, rank_sentences

        rng = np.random.default_rng(42)
        vocab = [f"w{i}" for i in range(20)]
        for _ in range(40):
            n_sents = int(rng.integers(1, 10))
            sentences = [
                " ".join(vocab[int(j)] for j in rng.integers(0, len(vocab), size=rng.integers(2, 9)))
                for _ in range(n_sents)
            ]
            question = " ".join(vocab[int(j)] for j in rng.integers(0, len(vocab), size=5))
            text = ". ".join(s.capitalize() for s in sentences) + "."
            item = QAExample("q", question, (text,), ())
            view = build_view(item)
            sent_texts = [view.text[s.char_start : s.char_end] for s in view.spans]
            lib = [i for i, _ in rank_sentences(tokenize(question), view, metric)]
            assert lib == brute_ranking(question, sent_texts, metric)
