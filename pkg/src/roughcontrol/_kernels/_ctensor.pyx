# cython: boundscheck=False, wraparound=True, cdivision=True
"""Compiled dense tensor kernels (hot inner loops of signature streaming)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


cdef void _offsets(int dim, int level, long* offs) noexcept nogil:
    cdef int k
    offs[0] = 0
    for k in range(level + 1):
        offs[k + 1] = offs[k] + <long>(dim ** k)


cdef void _mul_one(const double* a, const double* b, double* c,
                   int dim, int level, const long* offs) noexcept nogil:
    cdef int k, j
    cdef long i1, i2, na, nb, base
    cdef double av
    for k in range(level + 1):
        for i2 in range(offs[k], offs[k + 1]):
            c[i2] = 0.0
    for k in range(level + 1):
        for j in range(k + 1):
            na = offs[j + 1] - offs[j]
            nb = offs[k - j + 1] - offs[k - j]
            for i1 in range(na):
                av = a[offs[j] + i1]
                if av == 0.0:
                    continue
                base = offs[k] + i1 * nb
                for i2 in range(nb):
                    c[base + i2] += av * b[offs[k - j] + i2]


cdef void _exp_one(const double* v, double* e, int dim, int level,
                   const long* offs) noexcept nogil:
    cdef int k
    cdef long idx, n
    e[0] = 1.0
    for k in range(1, level + 1):
        n = offs[k + 1] - offs[k]
        for idx in range(n):
            e[offs[k] + idx] = e[offs[k - 1] + idx / dim] * v[idx % dim] / k


def mul(a, b, int dim, int level):
    """Truncated tensor product of flat coefficient arrays (batched)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    shape = np.broadcast_shapes(a.shape, b.shape)
    cdef cnp.ndarray[double, ndim=2] A = \
        np.ascontiguousarray(np.broadcast_to(a, shape)).reshape(-1, shape[-1])
    cdef cnp.ndarray[double, ndim=2] B = \
        np.ascontiguousarray(np.broadcast_to(b, shape)).reshape(-1, shape[-1])
    cdef long offs[64]
    _offsets(dim, level, offs)
    if A.shape[1] != offs[level + 1]:
        raise ValueError("flat length does not match dim/level")
    cdef cnp.ndarray[double, ndim=2] C = np.zeros_like(A)
    cdef Py_ssize_t m = A.shape[0], i
    cdef long p = offs[level + 1]
    with nogil:
        for i in range(m):
            _mul_one(&A[i, 0], &B[i, 0], &C[i, 0], dim, level, offs)
    return C.reshape(shape)


def exp_increment(v, int dim, int level):
    """exp of a pure level-1 element; v has shape (..., dim)."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    batch = v.shape[:-1]
    cdef cnp.ndarray[double, ndim=2] V = v.reshape(-1, dim)
    cdef long offs[64]
    _offsets(dim, level, offs)
    cdef long p = offs[level + 1]
    cdef cnp.ndarray[double, ndim=2] E = np.empty((V.shape[0], p))
    cdef Py_ssize_t m = V.shape[0], i
    with nogil:
        for i in range(m):
            _exp_one(&V[i, 0], &E[i, 0], dim, level, offs)
    return E.reshape(batch + (p,))


def sig_chain(incr, int dim, int level, int stride=1):
    """Chained signatures of a piecewise-linear path given its increments.

    incr has shape (m, n, dim); returns (m, n // stride + 1, P) running
    signatures stored at every stride-th step.
    """
    cdef cnp.ndarray[double, ndim=3] X = np.ascontiguousarray(incr, dtype=np.float64)
    cdef Py_ssize_t m = X.shape[0], n = X.shape[1]
    if X.shape[2] != dim:
        raise ValueError("increment dimension mismatch")
    if n % stride != 0:
        raise ValueError("stride must divide the number of increments")
    cdef long offs[64]
    _offsets(dim, level, offs)
    cdef long p = offs[level + 1]
    cdef cnp.ndarray[double, ndim=3] out = np.empty((m, n // stride + 1, p))
    cdef cnp.ndarray[double, ndim=1] cur = np.zeros(p)
    cdef cnp.ndarray[double, ndim=1] e = np.empty(p)
    cdef cnp.ndarray[double, ndim=1] nxt = np.empty(p)
    cdef double* curp = &cur[0]
    cdef double* ep = &e[0]
    cdef double* nxtp = &nxt[0]
    cdef double* tmp
    cdef Py_ssize_t i, j
    cdef long q
    with nogil:
        for i in range(m):
            for q in range(p):
                curp[q] = 0.0
            curp[0] = 1.0
            for q in range(p):
                out[i, 0, q] = curp[q]
            for j in range(n):
                _exp_one(&X[i, j, 0], ep, dim, level, offs)
                _mul_one(curp, ep, nxtp, dim, level, offs)
                tmp = curp
                curp = nxtp
                nxtp = tmp
                if (j + 1) % stride == 0:
                    for q in range(p):
                        out[i, (j + 1) // stride, q] = curp[q]
    return out
