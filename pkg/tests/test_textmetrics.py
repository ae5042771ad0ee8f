import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexigen.lexicon import LexigenError
from lexigen.textmetrics import (
    bleu_corpus,
    cosine,
    jaccard,
    length_stats,
    levenshtein,
    tokenize,
)

from fixtures import BLEU_FIXTURE_PAIRS
from oracles import bleu_naive, levenshtein_full_matrix

# Frozen oracle outputs for the 20-pair fixture.
BLEU_FIXTURE_CUMULATIVE = 0.2460205604955082
BLEU_FIXTURE_1GRAM = 0.540718108099143


class TestTokenize:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("El perro ladra.", ("el", "perro", "ladra")),
            ("¿Qué es FOMO?", ("qué", "es", "fomo")),
            ("", ()),
            ("   \t\n ", ()),
            ('"Llámame".', ("llámame",)),
            ("uno, dos... ¡tres!", ("uno", "dos", "tres")),
            ("café con-leche", ("café", "con-leche")),
        ],
    )
    def test_examples(self, text, expected):
        assert tokenize(text) == expected

    def test_diacritics_preserved_and_nfc(self):
        decomposed = "café"  # e + combining acute
        assert tokenize(decomposed) == ("café",)


class TestBleu:
    def test_perfect_match_is_one(self):
        pairs = [(("a", "b", "c"), ("a", "b", "c")), (("x", "y", "z", "w"), ("x", "y", "z", "w"))]
        assert bleu_corpus(pairs, 4) == pytest.approx(1.0)

    def test_disjoint_vocabulary_is_zero(self):
        assert bleu_corpus([(("a", "b"), ("c", "d"))], 1) == 0.0

    def test_fixture_matches_naive_oracle(self):
        weights = [0.25] * 4
        got = bleu_corpus(BLEU_FIXTURE_PAIRS, 4, weights)
        assert got == pytest.approx(bleu_naive(BLEU_FIXTURE_PAIRS, 4, weights), abs=1e-9)
        assert got == pytest.approx(BLEU_FIXTURE_CUMULATIVE, abs=1e-9)

    def test_fixture_1gram_matches_naive_oracle(self):
        got = bleu_corpus(BLEU_FIXTURE_PAIRS, 1, [1.0])
        assert got == pytest.approx(bleu_naive(BLEU_FIXTURE_PAIRS, 1, [1.0]), abs=1e-9)
        assert got == pytest.approx(BLEU_FIXTURE_1GRAM, abs=1e-9)

    def test_1gram_equals_clipped_precision_times_bp(self):
        pairs = [(("a", "a", "b"), ("a", "c", "c", "d"))]
        # clipped unigram matches: min(2,1)=1 of 3; BP = exp(1 - 4/3)
        assert bleu_corpus(pairs, 1, [1.0]) == pytest.approx(
            (1 / 3) * math.exp(1 - 4 / 3), abs=1e-12
        )

    def test_empty_candidates_score_zero(self):
        assert bleu_corpus([((), ("a", "b"))], 4) == 0.0

    def test_short_candidates_kill_higher_orders(self):
        # no candidate reaches 4 tokens -> p4 undefined -> 0 without smoothing
        pairs = [(("a", "b"), ("a", "b")), (("c",), ("c",))]
        assert bleu_corpus(pairs, 4) == 0.0
        assert bleu_corpus(pairs, 1) == pytest.approx(1.0)

    def test_weights_validated(self):
        with pytest.raises(ValueError):
            bleu_corpus([(("a",), ("a",))], 2, [1.0])
        with pytest.raises(ValueError):
            bleu_corpus([(("a",), ("a",))], 2, [0.9, 0.9])
        with pytest.raises(ValueError):
            bleu_corpus([], 1, [1.0])

    @settings(max_examples=150, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.lists(st.sampled_from("abcde"), max_size=8).map(tuple),
                st.lists(st.sampled_from("abcde"), max_size=8).map(tuple),
            ),
            min_size=1,
            max_size=6,
        )
    )
    def test_matches_oracle_and_bounded(self, pairs):
        for max_n in (1, 2, 4):
            weights = [1.0 / max_n] * max_n
            got = bleu_corpus(pairs, max_n, weights)
            assert got == pytest.approx(bleu_naive(pairs, max_n, weights), abs=1e-9)
            assert 0.0 <= got <= 1.0


class TestLevenshtein:
    @pytest.mark.parametrize(
        "a, b, expected",
        [
            ("", "", 0),
            ("", "casa", 4),
            ("casa", "", 4),
            ("casa", "casa", 0),
            ("kitten", "sitting", 3),
            ("flaw", "lawn", 2),
            ("árbol", "arbol", 1),
            ("Casa", "casa", 1),  # no case folding
        ],
    )
    def test_examples(self, a, b, expected):
        assert levenshtein(a, b) == expected

    def test_nfc_normalization_unifies_representations(self):
        assert levenshtein("café", "café") == 0

    def test_empty_vs_string_is_scalar_count(self):
        assert levenshtein("", "añejo") == 5

    def test_matches_full_matrix_oracle_on_random_pairs(self):
        rng = random.Random(20240811)
        alphabet = "abcdefgáéíóúñü¿?😀"
        for _ in range(300):
            a = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 21)))
            b = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 21)))
            assert levenshtein(a, b) == levenshtein_full_matrix(a, b)

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=12), st.text(max_size=12))
    def test_symmetry_and_identity(self, a, b):
        assert levenshtein(a, b) == levenshtein(b, a)
        assert levenshtein(a, a) == 0


class TestJaccard:
    def test_identical(self):
        assert jaccard(("a", "b"), ("b", "a", "a")) == 1.0

    def test_disjoint(self):
        assert jaccard(("a",), ("b",)) == 0.0

    def test_partial_overlap(self):
        assert jaccard(("a", "b"), ("b", "c")) == pytest.approx(1 / 3)

    def test_both_empty_defined_as_one(self):
        assert jaccard((), ()) == 1.0

    def test_one_empty(self):
        assert jaccard((), ("a",)) == 0.0

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.sampled_from("abcdef")).map(tuple),
        st.lists(st.sampled_from("abcdef")).map(tuple),
    )
    def test_symmetry_and_bounds(self, a, b):
        assert jaccard(a, b) == jaccard(b, a)
        assert 0.0 <= jaccard(a, b) <= 1.0
        if a:
            assert jaccard(a, a) == 1.0


class TestCosine:
    def test_self_similarity(self):
        v = (1.0, 2.0, -3.0)
        assert cosine(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine((1.0, 0.0), (0.0, 1.0)) == 0.0

    def test_scale_invariance(self):
        v = (0.3, -0.7, 2.0)
        assert cosine(v, tuple(2.0 * x for x in v)) == pytest.approx(1.0)

    def test_opposite(self):
        v = (1.0, 1.0)
        assert cosine(v, (-1.0, -1.0)) == pytest.approx(-1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(LexigenError):
            cosine((1.0,), (1.0, 2.0))

    def test_zero_norm_rejected(self):
        with pytest.raises(LexigenError):
            cosine((0.0, 0.0), (1.0, 0.0))


class TestLengthStats:
    def test_constant_corpus(self):
        stats = length_stats(["ab cd", "ab cd"])
        assert stats.mean_words == 2 and stats.sd_words == 0
        assert stats.mean_chars == 5 and stats.sd_chars == 0

    def test_hand_computed_population_sd(self):
        stats = length_stats(["a", "a a a"])
        assert stats.mean_words == pytest.approx(2.0)
        assert stats.sd_words == pytest.approx(1.0)
        assert stats.mean_chars == pytest.approx(3.0)
        assert stats.sd_chars == pytest.approx(2.0)

    def test_single_text_sd_zero(self):
        stats = length_stats(["tres palabras justas"])
        assert stats.sd_words == 0.0 and stats.sd_chars == 0.0

    def test_chars_counted_raw_words_tokenized(self):
        stats = length_stats(["¡Hola!"])
        assert stats.mean_words == 1.0
        assert stats.mean_chars == 6.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            length_stats([])
