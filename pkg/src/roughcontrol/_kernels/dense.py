"""Pure-numpy reference implementation of the dense tensor kernels.

All kernels act on flat per-level coefficient arrays of total length
P = 1 + dim + ... + dim^level with an arbitrary batch shape in front.
"""

import numpy as np

from ..words import level_offsets, total_words

BACKEND = "python"


def mul(a, b, dim, level):
    """Truncated tensor product of flat coefficient arrays (batched)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    offs = level_offsets(dim, level)
    p = offs[-1]
    shape = np.broadcast_shapes(a.shape, b.shape)
    A = np.broadcast_to(a, shape).reshape(-1, p)
    B = np.broadcast_to(b, shape).reshape(-1, p)
    m = A.shape[0]
    C = np.zeros((m, p))
    for k in range(level + 1):
        acc = C[:, offs[k]:offs[k + 1]]
        for j in range(k + 1):
            sa = A[:, offs[j]:offs[j + 1]]
            sb = B[:, offs[k - j]:offs[k - j + 1]]
            acc += (sa[:, :, None] * sb[:, None, :]).reshape(m, -1)
    return C.reshape(shape)


def exp_increment(v, dim, level):
    """exp of a pure level-1 element; v has shape (..., dim).

    The word (i_1, ..., i_k) coefficient is v_{i_1} * ... * v_{i_k} / k!.
    """
    v = np.asarray(v, dtype=np.float64)
    batch = v.shape[:-1]
    V = v.reshape(-1, dim)
    m = V.shape[0]
    offs = level_offsets(dim, level)
    out = np.empty((m, offs[-1]))
    out[:, 0] = 1.0
    prev = out[:, 0:1]
    for k in range(1, level + 1):
        cur = (prev[:, :, None] * V[:, None, :]).reshape(m, -1) / k
        out[:, offs[k]:offs[k + 1]] = cur
        prev = cur
    return out.reshape(batch + (offs[-1],))


def sig_chain(incr, dim, level, stride=1):
    """Chained signatures of a piecewise-linear path given its increments.

    incr has shape (m, n, dim).  Returns an (m, n // stride + 1, P) array of
    running signatures S_0 = 1, S_j = S_{j-1} (x) exp(incr_j), stored at every
    stride-th step.
    """
    incr = np.asarray(incr, dtype=np.float64)
    m, n, d = incr.shape
    if d != dim:
        raise ValueError("increment dimension mismatch")
    if n % stride != 0:
        raise ValueError("stride must divide the number of increments")
    p = total_words(dim, level)
    out = np.empty((m, n // stride + 1, p))
    cur = np.zeros((m, p))
    cur[:, 0] = 1.0
    out[:, 0] = cur
    for j in range(n):
        cur = mul(cur, exp_increment(incr[:, j], dim, level), dim, level)
        if (j + 1) % stride == 0:
            out[:, (j + 1) // stride] = cur
    return out
