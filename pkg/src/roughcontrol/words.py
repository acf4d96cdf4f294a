"""Word combinatorics for the truncated tensor algebra.

Words over the alphabet {0, ..., dim-1} index the dense coefficient arrays:
a word (i_1, ..., i_k) of length k maps to the flat offset

    offset(k) + sum_j i_j * dim**(k-1-j)

with the first letter most significant, so that within a level words are
stored in lexicographic order.  Level offsets are cumulative word counts
1, 1+dim, 1+dim+dim^2, ...
"""

from functools import lru_cache

import numpy as np

#: hard cap on word length for shuffle expansions (capacity guard)
MAX_SHUFFLE_LEVEL = 12


def level_sizes(dim, level):
    """Number of words per level, [1, dim, dim^2, ..., dim^level]."""
    return [dim ** k for k in range(level + 1)]


def level_offsets(dim, level):
    """Flat-array start offset of each level, plus the total length."""
    offs = [0]
    for k in range(level + 1):
        offs.append(offs[-1] + dim ** k)
    return offs


def total_words(dim, level):
    """Total number of words of length <= level (including the empty word)."""
    return level_offsets(dim, level)[-1]


def word_to_index(word, dim, offsets=None):
    """Flat index of a word given as a tuple of letters in {0, ..., dim-1}."""
    k = len(word)
    if offsets is None:
        offsets = level_offsets(dim, k)
    idx = 0
    for letter in word:
        if not 0 <= letter < dim:
            raise ValueError(f"letter {letter} outside alphabet of size {dim}")
        idx = idx * dim + letter
    return offsets[k] + idx


def index_to_word(index, dim, level):
    """Inverse of word_to_index."""
    offsets = level_offsets(dim, level)
    for k in range(level + 1):
        if index < offsets[k + 1]:
            rel = index - offsets[k]
            word = []
            for _ in range(k):
                word.append(rel % dim)
                rel //= dim
            return tuple(reversed(word))
    raise IndexError(f"index {index} out of range for dim={dim}, level={level}")


def word_to_digits(word):
    """Human-readable digit string, letters printed 1-based ('' for the empty word)."""
    return "".join(str(letter + 1) for letter in word)


def digits_to_word(digits):
    """Inverse of word_to_digits."""
    return tuple(int(c) - 1 for c in digits)


@lru_cache(maxsize=None)
def shuffle_words(u, v):
    """Shuffle product of two words, as a dict word -> multiplicity.

    Classic recursion: sh(ua, vb) = sh(u, vb).a + sh(ua, v).b.
    """
    if len(u) + len(v) > MAX_SHUFFLE_LEVEL:
        raise ValueError(
            f"shuffle of lengths {len(u)}+{len(v)} exceeds cap {MAX_SHUFFLE_LEVEL}"
        )
    if not u:
        return {v: 1}
    if not v:
        return {u: 1}
    out = {}
    for w, c in shuffle_words(u[:-1], v).items():
        key = w + (u[-1],)
        out[key] = out.get(key, 0) + c
    for w, c in shuffle_words(u, v[:-1]).items():
        key = w + (v[-1],)
        out[key] = out.get(key, 0) + c
    return out


def lyndon_words(dim, level):
    """All Lyndon words of length <= level, ordered by (length, lex).

    Generated with Duval's algorithm.
    """
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        out.append(tuple(w))
        m = len(w)
        while len(w) < level:
            w.append(w[len(w) % m])
        while w and w[-1] == dim - 1:
            w.pop()
    return sorted(out, key=lambda t: (len(t), t))


def is_lyndon(word):
    """True if the word is strictly smaller than all its proper rotations."""
    n = len(word)
    if n == 0:
        return False
    for r in range(1, n):
        if word[r:] + word[:r] <= word:
            return False
    return True


def standard_factorization(word):
    """Standard right factorization w = (u, v) with v the longest proper Lyndon suffix."""
    n = len(word)
    if n < 2:
        raise ValueError("standard factorization needs length >= 2")
    for start in range(1, n):
        if is_lyndon(word[start:]):
            return word[:start], word[start:]
    raise AssertionError("unreachable: every word of length >= 2 has a Lyndon suffix")


@lru_cache(maxsize=None)
def bracket_expansion(word):
    """Tensor expansion of the right-normed bracketing of a Lyndon word.

    Returns a dict word -> float coefficient.  A single letter expands to
    itself; otherwise rho(w) = [rho(u), rho(v)] for the standard
    factorization w = uv.
    """
    if len(word) == 1:
        return {word: 1.0}
    u, v = standard_factorization(word)
    eu = bracket_expansion(u)
    ev = bracket_expansion(v)
    out = {}
    for wu, cu in eu.items():
        for wv, cv in ev.items():
            out[wu + wv] = out.get(wu + wv, 0.0) + cu * cv
            out[wv + wu] = out.get(wv + wu, 0.0) - cu * cv
    return {w: c for w, c in out.items() if c != 0.0}


def necklace_count(dim, length):
    """Number of Lyndon words of exactly the given length (Witt formula)."""
    from sympy import mobius, divisors

    return sum(mobius(d) * dim ** (length // d) for d in divisors(length)) // length


def lyndon_projection_matrix(dim, level):
    """Matrix mapping flat tensor coefficients of a Lie element to Lyndon coordinates.

    Returns (words, proj) where words is the ordered Lyndon basis and proj is
    an (eta, total_words) array: coords = proj @ flat_coeffs.  Built from the
    triangular change of basis between bracketed Lyndon words and the word
    coordinates at Lyndon-word positions.
    """
    from scipy.linalg import solve_triangular

    words = lyndon_words(dim, level)
    eta = len(words)
    offsets = level_offsets(dim, level)
    row_of = {w: i for i, w in enumerate(words)}
    # M[r, c] = coefficient of lyndon word r in expansion of bracket c
    mat = np.zeros((eta, eta))
    for c, w in enumerate(words):
        for ww, coeff in bracket_expansion(w).items():
            r = row_of.get(ww)
            if r is not None:
                mat[r, c] = coeff
    # lower triangular with unit diagonal in the (length, lex) ordering
    sel = np.zeros((eta, total_words(dim, level)))
    for i, w in enumerate(words):
        sel[i, word_to_index(w, dim, offsets)] = 1.0
    inv = solve_triangular(mat, np.eye(eta), lower=True, unit_diagonal=True)
    return words, inv @ sel


def lyndon_expansion_matrix(dim, level):
    """(total_words, eta) array mapping Lyndon coordinates to flat tensor coefficients."""
    words = lyndon_words(dim, level)
    offsets = level_offsets(dim, level)
    mat = np.zeros((total_words(dim, level), len(words)))
    for c, w in enumerate(words):
        for ww, coeff in bracket_expansion(w).items():
            mat[word_to_index(ww, dim, offsets), c] = coeff
    return mat
