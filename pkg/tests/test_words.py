"""
Tests for free-product word reduction and cyclic reducedness.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pathpart.fingroup import builtin_group
from pathpart.words import (
    CRWord,
    Letter,
    format_word,
    invert,
    is_cyclically_reduced,
    is_cyclically_reduced_literal,
    is_reduced,
    parse_word,
    power,
    reduce,
    reduce_concat,
    support,
    word_key,
)

DEC = [builtin_group("Z2"), builtin_group("Z3"), builtin_group("Z3")]
LABELS = ["a", "b", "c"]


def letters_strategy(dec=DEC, max_size=8):
    letter = st.integers(0, len(dec) - 1).flatmap(
        lambda v: st.integers(1, dec[v].order - 1).map(lambda x: Letter(v, x))
    )
    return st.lists(letter, max_size=max_size).map(tuple)


def random_word(rng, dec, max_len=8):
    length = int(rng.integers(0, max_len + 1))
    out = []
    for v in rng.integers(0, len(dec), size=length):
        v = int(v)
        out.append(Letter(v, int(rng.integers(1, dec[v].order))))
    return tuple(out)


class TestReduce:
    def test_cancellation(self):
        assert reduce([Letter(0, 1), Letter(0, 1)], DEC) == ()

    def test_merge(self):
        assert reduce([Letter(1, 1), Letter(1, 1)], DEC) == (Letter(1, 2),)

    def test_cascade(self):
        w = [Letter(0, 1), Letter(1, 1), Letter(1, 2), Letter(0, 1)]
        assert reduce(w, DEC) == ()

    def test_rejects_identity_letter(self):
        with pytest.raises(ValueError):
            reduce([Letter(1, 0)], DEC)

    def test_rejects_unknown_vertex(self):
        with pytest.raises(KeyError):
            reduce([Letter(5, 1)], DEC)

    def test_concat(self):
        assert reduce_concat([(Letter(0, 1),), (Letter(1, 1),), (Letter(1, 2),)], DEC) == (Letter(0, 1),)


class TestCyclicallyReduced:
    def test_examples(self):
        assert is_cyclically_reduced(())
        assert is_cyclically_reduced((Letter(0, 1),))
        assert is_cyclically_reduced((Letter(0, 1), Letter(1, 1)))
        assert not is_cyclically_reduced((Letter(0, 1), Letter(1, 1), Letter(0, 1)))
        assert not is_cyclically_reduced((Letter(1, 1), Letter(1, 1)))

    def test_shortcut_matches_literal_exhaustively(self):
        # every word of length <= 8 over two vertices with Z2, Z3
        alphabet = [Letter(0, 1), Letter(1, 1), Letter(1, 2)]
        for n in range(9):
            for w in itertools.product(alphabet, repeat=n):
                assert is_cyclically_reduced(w) == is_cyclically_reduced_literal(w), w

    def test_shortcut_matches_literal_three_vertices(self):
        alphabet = [Letter(0, 1), Letter(1, 1), Letter(2, 2)]
        for n in range(7):
            for w in itertools.product(alphabet, repeat=n):
                assert is_cyclically_reduced(w) == is_cyclically_reduced_literal(w)

    def test_crword_rejects(self):
        with pytest.raises(ValueError):
            CRWord((Letter(0, 1), Letter(1, 1), Letter(0, 1)))

    def test_crword_support(self):
        assert CRWord((Letter(0, 1), Letter(2, 1))).support == frozenset({0, 2})


class TestProperties:
    @settings(max_examples=200, derandomize=True, deadline=None)
    @given(w=letters_strategy())
    def test_reduce_idempotent(self, w):
        r = reduce(w, DEC)
        assert reduce(r, DEC) == r
        assert is_reduced(r)

    @settings(max_examples=200, derandomize=True, deadline=None)
    @given(w=letters_strategy())
    def test_inverse_cancels(self, w):
        assert reduce_concat([w, invert(w, DEC)], DEC) == ()
        assert invert(invert(w, DEC), DEC) == w

    @settings(max_examples=200, derandomize=True, deadline=None)
    @given(u=letters_strategy(), v=letters_strategy(), w=letters_strategy())
    def test_associativity_transport(self, u, v, w):
        left = reduce_concat([reduce_concat([u, v], DEC), w], DEC)
        right = reduce_concat([u, reduce_concat([v, w], DEC)], DEC)
        assert left == right == reduce(u + v + w, DEC)

    @settings(max_examples=200, derandomize=True, deadline=None)
    @given(w=letters_strategy())
    def test_squaring_criterion(self, w):
        u = reduce(w, DEC)
        squared = reduce(u + u, DEC)
        assert len(squared) <= 2 * len(u)
        if len(u) < 2:
            return
        assert (len(squared) == 2 * len(u)) == is_cyclically_reduced(u)

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(w=letters_strategy())
    def test_power_length(self, w):
        u = reduce(w, DEC)
        if len(u) >= 2 and is_cyclically_reduced(u):
            for n in range(1, 6):
                assert len(power(u, n, DEC)) == n * len(u)

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(w=letters_strategy())
    def test_invert_preserves_cyclic_reducedness(self, w):
        u = reduce(w, DEC)
        assert is_cyclically_reduced(invert(u, DEC)) == is_cyclically_reduced(u)


class TestSeededOracle:
    def test_ten_thousand_words(self):
        rng = np.random.default_rng(20240917)
        for _ in range(10_000):
            u, v, w = (random_word(rng, DEC) for _ in range(3))
            ru = reduce(u, DEC)
            assert reduce(ru, DEC) == ru
            assert reduce_concat([ru, invert(ru, DEC)], DEC) == ()
            assert reduce_concat([reduce_concat([u, v], DEC), w], DEC) == reduce_concat([u, reduce_concat([v, w], DEC)], DEC)
            assert is_cyclically_reduced(ru) == is_cyclically_reduced_literal(ru)


class TestSyntax:
    def test_parse(self):
        w = parse_word("a.1 b.2 a", LABELS.index, DEC)
        assert w == (Letter(0, 1), Letter(1, 2), Letter(0, 1))

    @pytest.mark.parametrize("text", ["", "()", "∅"])
    def test_empty(self, text):
        assert parse_word(text, LABELS.index, DEC) == ()

    def test_format(self):
        w = (Letter(0, 1), Letter(1, 2))
        assert format_word(w, LABELS) == "a.1 b.2"
        assert format_word((), LABELS) == "()"

    def test_format_with_group_labels(self):
        dec = [builtin_group("V4")]
        assert format_word((Letter(0, 3),), ["v"], dec) == "v.ab"
        assert parse_word("v.ab", ["v"].index, dec) == (Letter(0, 3),)

    def test_support_and_key(self):
        w = (Letter(2, 1), Letter(0, 1))
        assert support(w) == frozenset({0, 2})
        assert word_key(()) < word_key((Letter(2, 1),)) < word_key(w)
