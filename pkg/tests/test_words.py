"""Word indexing, shuffle products, and Lyndon machinery."""

import numpy as np
import pytest

from roughcontrol.words import (bracket_expansion, digits_to_word, is_lyndon,
                                index_to_word, level_offsets, level_sizes,
                                lyndon_expansion_matrix,
                                lyndon_projection_matrix, lyndon_words,
                                necklace_count, shuffle_words,
                                standard_factorization, total_words,
                                word_to_digits, word_to_index)


def test_level_sizes_and_total():
    assert level_sizes(2, 3) == [1, 2, 4, 8]
    assert total_words(2, 3) == 15
    assert total_words(3, 2) == 13
    assert list(level_offsets(2, 2))[:3] == [0, 1, 3]


def test_word_index_round_trip():
    for dim in (2, 3):
        for level in (1, 2, 3):
            for i in range(total_words(dim, level)):
                w = index_to_word(i, dim, level)
                assert word_to_index(w, dim) == i


def test_first_letter_is_most_significant():
    # within a level, words are ordered like base-d numbers
    assert word_to_index((0, 1), 2) < word_to_index((1, 0), 2)
    assert index_to_word(word_to_index((1, 0), 2) , 2, 2) == (1, 0)


def test_digits_round_trip():
    # letters print 1-based
    assert word_to_digits((1, 0, 1)) == "212"
    assert digits_to_word("212") == (1, 0, 1)
    assert digits_to_word("") == ()


def test_shuffle_small_cases():
    # 0 sh 1 = 01 + 10
    assert shuffle_words((0,), (1,)) == {(0, 1): 1.0, (1, 0): 1.0}
    # 0 sh 0 = 2 * 00
    assert shuffle_words((0,), (0,)) == {(0, 0): 2.0}
    # empty word is the unit
    assert shuffle_words((), (0, 1)) == {(0, 1): 1.0}


def test_shuffle_counts_and_symmetry():
    u, v = (0, 1), (1, 0)
    sh = shuffle_words(u, v)
    # total multiplicity is binomial(4, 2)
    assert sum(sh.values()) == pytest.approx(6.0)
    assert sh == shuffle_words(v, u)


def test_lyndon_words_count():
    expected = [2, 3, 5, 8, 14]
    for level, count in enumerate(expected, start=1):
        assert len(lyndon_words(2, level)) == count


def test_lyndon_property():
    for w in lyndon_words(2, 5):
        assert is_lyndon(w)
        rotations = [w[k:] + w[:k] for k in range(1, len(w))]
        assert all(w < r for r in rotations)
    assert not is_lyndon((1, 0))
    assert not is_lyndon((0, 1, 0, 1))


def test_standard_factorization():
    # w = uv with v the longest proper Lyndon suffix
    u, v = standard_factorization((0, 0, 1, 1))
    assert u + v == (0, 0, 1, 1)
    assert is_lyndon(v)


def test_bracket_expansion_level2():
    # [0,1] expands to 01 - 10
    exp = bracket_expansion((0, 1))
    assert exp == {(0, 1): 1.0, (1, 0): -1.0}


def test_necklace_count_matches_enumeration():
    for length in range(1, 6):
        direct = sum(1 for w in lyndon_words(2, length) if len(w) == length)
        assert necklace_count(2, length) == direct


def test_projection_expansion_inverse():
    for level in (2, 3, 4):
        words_p, proj = lyndon_projection_matrix(2, level)
        exp = lyndon_expansion_matrix(2, level)
        eta = len(lyndon_words(2, level))
        assert list(words_p) == lyndon_words(2, level)
        assert proj.shape[0] == eta
        np.testing.assert_allclose(proj @ exp, np.eye(eta), atol=1e-12)
