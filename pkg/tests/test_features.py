import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from offlang.features import (
    AuxExtractor,
    SentimentLexicon,
    build_aux_vector,
    count_syllables,
    fit_tfidf,
    fk_grade_level,
    flesch_reading_ease,
    sentiment_compound,
    surface_counts,
    tokenize,
    transform_tfidf,
)
from offlang.errors import ValidationError


class TestTokenize:
    def test_lowercase_split(self):
        assert tokenize("Fuck I cried") == ["fuck", "i", "cried"]

    def test_mentions_hashtags_kept(self):
        assert tokenize("@USER is a #pervert!") == ["@user", "is", "a", "#pervert"]

    def test_empty(self):
        assert tokenize("") == []

    def test_urls_kept_whole(self):
        assert tokenize("se https://eb.dk/nyhed nu") == ["se", "https://eb.dk/nyhed", "nu"]

    def test_danish_letters(self):
        assert tokenize("Åh nej, lorteræv!") == ["åh", "nej", "lorteræv"]

    def test_no_empty_tokens_property(self):
        for text in ["...", " - ", "a!!b", "__", "1.2"]:
            assert all(tokenize(text))


class TestTfIdf:
    def test_fit_hand_counts(self):
        m = fit_tfidf([["a", "b", "a"], ["b", "c"]], n_range=(1, 1))
        assert set(m.vocab) == {"a", "b", "c"}
        assert m.doc_freq == {"a": 1, "b": 2, "c": 1}
        assert m.n_docs == 2

    def test_min_df(self):
        m = fit_tfidf([["a", "b", "a"], ["b", "c"]], n_range=(1, 1), min_df=2)
        assert set(m.vocab) == {"b"}

    def test_char_mode(self):
        m = fit_tfidf([["ab"]], n_range=(2, 2), mode="char")
        assert "ab" in m.vocab

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            fit_tfidf([], n_range=(1, 1))

    def test_transform_hand_computed(self):
        m = fit_tfidf([["a", "b", "a"], ["b", "c"]], n_range=(1, 1))
        vec = transform_tfidf(m, ["a", "a"])
        # tf=2, idf = ln(2/1) + 1
        expected = 2.0 * (math.log(2.0) + 1.0)
        assert vec[m.vocab["a"]] == pytest.approx(expected, abs=1e-9)
        assert vec[m.vocab["b"]] == 0.0
        assert vec[m.vocab["c"]] == 0.0

    def test_transform_df_equals_ndocs(self):
        m = fit_tfidf([["a", "b", "a"], ["b", "c"]], n_range=(1, 1))
        vec = transform_tfidf(m, ["b"])
        assert vec[m.vocab["b"]] == pytest.approx(1.0, abs=1e-9)

    def test_oov_gives_zero_vector(self):
        m = fit_tfidf([["a", "b", "a"], ["b", "c"]], n_range=(1, 1))
        assert not transform_tfidf(m, ["z"]).any()

    @settings(max_examples=40, deadline=None)
    @given(
        docs=st.lists(
            st.lists(st.sampled_from("abcde"), min_size=1, max_size=6),
            min_size=1,
            max_size=6,
        ),
        doc=st.lists(st.sampled_from("abcdez"), max_size=6),
    )
    def test_nonnegative_and_zero_iff_disjoint(self, docs, doc):
        m = fit_tfidf(docs, n_range=(1, 2))
        vec = transform_tfidf(m, doc)
        assert (vec >= 0.0).all()
        from offlang.features import word_ngrams

        shared = set(word_ngrams(doc, (1, 2))) & set(m.vocab)
        assert bool(vec.any()) == bool(shared)


LEX = SentimentLexicon({"good": 3, "bad": -3})


class TestSentiment:
    def test_positive_compound(self):
        # s = 3 -> 3 / sqrt(9 + 15)
        value = sentiment_compound(LEX, ["good", "good", "bad"])
        assert value == pytest.approx(0.6123724356957945, abs=1e-9)

    def test_no_hits(self):
        assert sentiment_compound(LEX, ["neutralword"]) == 0.0

    def test_negative_compound(self):
        # s = -6 -> -6 / sqrt(36 + 15)
        value = sentiment_compound(LEX, ["bad", "bad"])
        assert value == pytest.approx(-0.8401680504168059, abs=1e-9)

    def test_score_range_validated(self):
        with pytest.raises(ValidationError):
            SentimentLexicon({"x": 9})
        with pytest.raises(ValidationError):
            SentimentLexicon({})

    @settings(max_examples=50, deadline=None)
    @given(doc=st.lists(st.sampled_from(["good", "bad", "meh", "ok"]), max_size=30))
    def test_range_and_zero_iff_sum_zero(self, doc):
        value = sentiment_compound(LEX, doc)
        assert -1.0 < value < 1.0
        s = 3 * doc.count("good") - 3 * doc.count("bad")
        assert (value == 0.0) == (s == 0)

    @settings(max_examples=50, deadline=None)
    @given(doc=st.lists(st.sampled_from(["good", "bad", "meh"]), max_size=30))
    def test_odd_under_lexicon_negation(self, doc):
        negated = SentimentLexicon({w: -s for w, s in LEX.scores.items()})
        assert sentiment_compound(negated, doc) == pytest.approx(
            -sentiment_compound(LEX, doc), abs=1e-12
        )

    def test_load_afinn_style(self, tmp_path):
        path = tmp_path / "afinn.tsv"
        path.write_text("god\t3\nlort\t-4\n", encoding="utf-8")
        lex = SentimentLexicon.load(path)
        assert lex.scores == {"god": 3, "lort": -4}


class TestSyllables:
    @pytest.mark.parametrize(
        "word,expected",
        [
            ("cat", 1),
            ("banana", 3),
            ("there", 1),  # trailing silent e
            ("be", 1),  # too short for the silent-e rule
            ("bee", 1),  # trailing e inside a larger vowel group
            ("xyz", 1),  # no vowels still counts one
            ("kæreste", 2),
            ("møde", 1),
        ],
    )
    def test_examples(self, word, expected):
        assert count_syllables(word) == expected

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            count_syllables("")

    @settings(max_examples=50, deadline=None)
    @given(word=st.text(alphabet="abcdefghijklmnopqrstuvwxyzæøå", min_size=1, max_size=12))
    def test_at_least_one(self, word):
        assert count_syllables(word) >= 1


class TestReadability:
    # "cat sat on a banana": 5 words, 7 syllables, 1 sentence
    TEXT = "cat sat on a banana"

    def test_flesch_reading_ease(self):
        expected = 206.835 - 1.015 * (5 / 1) - 84.6 * (7 / 5)
        assert flesch_reading_ease(self.TEXT) == pytest.approx(expected, abs=1e-9)
        assert expected == pytest.approx(83.32, abs=1e-9)

    def test_fk_grade_level(self):
        expected = 0.39 * (5 / 1) + 11.8 * (7 / 5) - 15.59
        assert fk_grade_level(self.TEXT) == pytest.approx(expected, abs=1e-9)
        assert expected == pytest.approx(2.88, abs=1e-9)

    def test_single_monosyllabic_word(self):
        assert flesch_reading_ease("cat") == pytest.approx(206.835 - 1.015 - 84.6, abs=1e-9)
        assert fk_grade_level("cat") == pytest.approx(0.39 + 11.8 - 15.59, abs=1e-9)

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            flesch_reading_ease("")
        with pytest.raises(ValueError):
            fk_grade_level("...")

    def test_sentence_runs(self):
        # "Hi!!! Ok." -> two sentence-terminator runs
        one = flesch_reading_ease("cat cat")
        two = flesch_reading_ease("cat! cat.")
        assert two > one  # fewer words per sentence raises the score


class TestSurfaceCounts:
    def test_hand_count(self):
        stats = surface_counts("@USER lol #fun")
        assert stats.n_mentions == 1
        assert stats.n_hashtags == 1
        assert stats.n_words == 3

    def test_empty(self):
        stats = surface_counts("")
        assert stats.as_array().tolist() == [0.0] * 7

    def test_retweets_case_insensitive(self):
        assert surface_counts("RT rt").n_retweets == 2

    def test_chars_are_unicode_scalars(self):
        assert surface_counts("æøå").n_chars == 3

    def test_words_cover_hashtags_and_mentions(self):
        stats = surface_counts("@a #b c http://d.dk")
        assert stats.n_words >= stats.n_hashtags + stats.n_mentions
        assert stats.n_urls == 1


class TestAuxVector:
    def setup_method(self):
        self.tfidf = fit_tfidf([["good", "bad"], ["bad", "dog"]], n_range=(1, 1))
        self.lex = LEX

    def test_layout_and_channels(self):
        fv = build_aux_vector("good good bad", self.tfidf, self.lex)
        names = [ch.name for ch in fv.layout]
        assert names == ["tfidf", "pos_tfidf", "sentiment", "counts", "reading"]
        assert sum(ch.length for ch in fv.layout) == len(fv.values)
        assert fv.channel("sentiment")[0] == pytest.approx(0.6123724356957945, abs=1e-9)

    def test_pos_block_zero_without_tags(self):
        pos_model = fit_tfidf([["N", "V"], ["N"]], n_range=(1, 1))
        with_tags = build_aux_vector("good", self.tfidf, self.lex, ["N"], pos_model)
        without = build_aux_vector("good", self.tfidf, self.lex, None, pos_model)
        assert len(with_tags.values) == len(without.values)
        assert not without.channel("pos_tfidf").any()
        assert with_tags.channel("pos_tfidf").any()

    def test_tags_without_model_rejected(self):
        with pytest.raises(ValueError):
            build_aux_vector("good", self.tfidf, self.lex, ["N"], None)

    def test_deterministic(self):
        a = build_aux_vector("good bad #x", self.tfidf, self.lex)
        b = build_aux_vector("good bad #x", self.tfidf, self.lex)
        assert np.array_equal(a.values, b.values)
        assert a.layout == b.layout

    @settings(max_examples=40, deadline=None)
    @given(text=st.text(alphabet="abcdæø @#.!", max_size=40))
    def test_layout_stable_over_random_texts(self, text):
        extractor = AuxExtractor(self.tfidf, self.lex)
        fv = extractor.transform(text)
        assert len(fv.values) == extractor.dim
        assert [ch.name for ch in fv.layout] == [
            "tfidf",
            "pos_tfidf",
            "sentiment",
            "counts",
            "reading",
        ]
