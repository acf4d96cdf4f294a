"""Truncated tensor algebra over R^dim.

Elements are stored as flat dense coefficient arrays of length
P = 1 + dim + ... + dim^level, levels concatenated, words in lexicographic
order within a level (first letter most significant).  The heavy operations
(product, exp of level-1 elements, signature chaining) are delegated to the
kernel backend; series exp/log are thin Horner loops on top of the product.
"""

import csv

import numpy as np

from . import _kernels as kernels
from . import words as words_mod
from .words import (
    MAX_SHUFFLE_LEVEL,
    level_offsets,
    lyndon_words,
    shuffle_words,
    total_words,
    word_to_index,
    index_to_word,
    word_to_digits,
    digits_to_word,
)


def zero(dim, level, batch=()):
    """Flat coefficients of the zero element."""
    return np.zeros(tuple(batch) + (total_words(dim, level),))


def unit(dim, level, batch=()):
    """Flat coefficients of the multiplicative unit (empty word = 1)."""
    out = zero(dim, level, batch)
    out[..., 0] = 1.0
    return out


def tensor_mul(a, b, dim, level):
    """Truncated tensor product, batched over leading axes."""
    return kernels.mul(a, b, dim, level)


def tensor_exp(a, dim, level):
    """Tensor exponential of an element with zero scalar part.

    Horner evaluation: e <- 1 + (a x e)/k for k = level..1.
    """
    a = np.asarray(a, dtype=np.float64)
    if not np.allclose(a[..., 0], 0.0):
        raise ValueError("tensor_exp requires zero scalar part")
    out = zero(dim, level, a.shape[:-1])
    out[..., 0] = 1.0
    for k in range(level, 0, -1):
        out = kernels.mul(a, out, dim, level) / k
        out[..., 0] += 1.0
    return out


def tensor_log(g, dim, level):
    """Tensor logarithm of an element with unit scalar part.

    Horner evaluation of sum_n (-1)^(n+1) a^n / n with a = g - 1.
    """
    g = np.asarray(g, dtype=np.float64)
    if not np.allclose(g[..., 0], 1.0):
        raise ValueError("tensor_log requires unit scalar part")
    a = g.copy()
    a[..., 0] -= 1.0
    out = zero(dim, level, g.shape[:-1])
    for n in range(level, 0, -1):
        out *= -n / (n + 1.0)
        out[..., 0] += 1.0
        out = kernels.mul(a, out, dim, level)
    return out


def pair(ell, g):
    """Dual pairing <ell, g> = sum over words of ell_w * g_w (level 0 included)."""
    ell = np.asarray(ell, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    return np.einsum("...p,...p->...", ell, g)


def shuffle_mul(a, b, dim, level):
    """Shuffle product of flat coefficient arrays, truncated at level.

    Quadratic in the number of nonzero words, so only batched over nothing;
    intended for building quadratic objectives, not hot loops.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("shuffle_mul operates on single flat arrays")
    offs = level_offsets(dim, level)
    out = np.zeros(offs[-1])
    for ia in np.nonzero(a)[0]:
        wa = index_to_word(ia, dim, level)
        for ib in np.nonzero(b)[0]:
            wb = index_to_word(int(ib), dim, level)
            if len(wa) + len(wb) > level:
                continue
            coef = a[ia] * b[ib]
            for w, c in shuffle_words(wa, wb).items():
                out[word_to_index(w, dim, offs)] += coef * c
    return out


class TruncatedTensor:
    """Convenience wrapper around a single flat coefficient array."""

    def __init__(self, dim, level, coeffs=None):
        self.dim = dim
        self.level = level
        p = total_words(dim, level)
        if coeffs is None:
            self.coeffs = np.zeros(p)
        else:
            coeffs = np.asarray(coeffs, dtype=np.float64)
            if coeffs.shape != (p,):
                raise ValueError(f"expected flat array of length {p}")
            self.coeffs = coeffs.copy()

    @classmethod
    def unit(cls, dim, level):
        t = cls(dim, level)
        t.coeffs[0] = 1.0
        return t

    @classmethod
    def from_words(cls, dim, level, entries):
        """Build from a mapping of digit strings (or letter tuples) to values."""
        t = cls(dim, level)
        for w, val in entries.items():
            t[w] = val
        return t

    def _key(self, word):
        if isinstance(word, str):
            word = digits_to_word(word)
        return word_to_index(tuple(word), self.dim)

    def __getitem__(self, word):
        return self.coeffs[self._key(word)]

    def __setitem__(self, word, value):
        self.coeffs[self._key(word)] = value

    def _check(self, other):
        if (self.dim, self.level) != (other.dim, other.level):
            raise ValueError("dim/level mismatch")

    def __add__(self, other):
        self._check(other)
        return TruncatedTensor(self.dim, self.level, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return TruncatedTensor(self.dim, self.level, self.coeffs - other.coeffs)

    def __rmul__(self, scalar):
        return TruncatedTensor(self.dim, self.level, float(scalar) * self.coeffs)

    def __mul__(self, other):
        self._check(other)
        return TruncatedTensor(
            self.dim, self.level,
            tensor_mul(self.coeffs, other.coeffs, self.dim, self.level))

    def shuffle(self, other):
        self._check(other)
        return TruncatedTensor(
            self.dim, self.level,
            shuffle_mul(self.coeffs, other.coeffs, self.dim, self.level))

    def exp(self):
        return TruncatedTensor(
            self.dim, self.level, tensor_exp(self.coeffs, self.dim, self.level))

    def log(self):
        return TruncatedTensor(
            self.dim, self.level, tensor_log(self.coeffs, self.dim, self.level))

    def pair(self, other):
        self._check(other)
        return float(pair(self.coeffs, other.coeffs))

    def __repr__(self):
        nz = np.nonzero(self.coeffs)[0]
        terms = ", ".join(
            f"'{word_to_digits(index_to_word(int(i), self.dim, self.level))}': "
            f"{self.coeffs[i]:g}" for i in nz[:8])
        if len(nz) > 8:
            terms += ", ..."
        return f"TruncatedTensor(dim={self.dim}, level={self.level}, {{{terms}}})"

    def to_csv(self, path):
        """Write nonzero coefficients as word,coefficient rows."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["word", "coefficient"])
            for i in np.nonzero(self.coeffs)[0]:
                word = word_to_digits(index_to_word(int(i), self.dim, self.level))
                w.writerow([word, repr(float(self.coeffs[i]))])

    @classmethod
    def from_csv(cls, path, dim, level):
        t = cls(dim, level)
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                t[row["word"]] = float(row["coefficient"])
        return t


class LyndonBasis:
    """Lyndon-word basis of the free Lie algebra truncated at a given level.

    Provides the coordinate maps between Lie elements of the tensor algebra
    and their coordinates in the bracketed Lyndon basis.
    """

    def __init__(self, dim, level):
        self.dim = dim
        self.level = level
        self.words, self.projection = words_mod.lyndon_projection_matrix(dim, level)
        self.expansion = words_mod.lyndon_expansion_matrix(dim, level)

    @property
    def eta(self):
        """Dimension of the truncated free Lie algebra."""
        return len(self.words)

    def labels(self):
        return [word_to_digits(w) for w in self.words]

    def coordinates(self, lie_flat):
        """Lyndon coordinates of a Lie element given by flat tensor coefficients."""
        return np.asarray(lie_flat) @ self.projection.T

    def to_tensor(self, coords):
        """Flat tensor coefficients of the Lie element with given coordinates."""
        return np.asarray(coords) @ self.expansion.T

    def log_coordinates(self, group_flat):
        """Lyndon coordinates of log(g) for a group-like flat array (batched)."""
        lg = tensor_log(group_flat, self.dim, self.level)
        return self.coordinates(lg)
