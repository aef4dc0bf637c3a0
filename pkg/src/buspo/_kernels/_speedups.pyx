# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled numeric kernels.

Mirrors `pure` op-for-op: same accumulation order, same libm calls, so
results are bit-identical across backends. Keep both in lockstep.
"""

from libc.math cimport exp, isfinite, sqrt
from libc.stdlib cimport free, malloc

NAME = "compiled"


cdef int _softmax_inplace(double* s, Py_ssize_t n, double tau) except -1:
    cdef Py_ssize_t k
    cdef double m, e, total
    m = s[0]
    for k in range(n):
        if not isfinite(s[k]):
            raise ValueError("non-finite score in softmax")
        if s[k] > m:
            m = s[k]
    total = 0.0
    for k in range(n):
        e = exp((s[k] - m) / tau)
        s[k] = e
        total += e
    for k in range(n):
        s[k] = s[k] / total
    return 0


def softmax(double[::1] scores, double tau):
    """Softmax with max subtraction; temperature tau divides the shifted scores."""
    cdef Py_ssize_t n = scores.shape[0]
    if n == 0:
        return []
    cdef double* buf = <double*> malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t k
    try:
        for k in range(n):
            buf[k] = scores[k]
        _softmax_inplace(buf, n, tau)
        return [buf[k] for k in range(n)]
    finally:
        free(buf)


def linear_probs(long long[::1] ids, double[::1] weights, double[::1] bias, double tau):
    """Class probabilities of a bag of word ids under a flat K-per-word weight table."""
    cdef Py_ssize_t k_count = bias.shape[0]
    cdef Py_ssize_t n_ids = ids.shape[0]
    if k_count == 0:
        return []
    cdef double* scores = <double*> malloc(k_count * sizeof(double))
    if scores == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, k
    cdef long long base
    try:
        for k in range(k_count):
            scores[k] = bias[k]
        for i in range(n_ids):
            base = ids[i] * k_count
            for k in range(k_count):
                scores[k] += weights[base + k]
        _softmax_inplace(scores, k_count, tau)
        return [scores[k] for k in range(k_count)]
    finally:
        free(scores)


def mean_rows(long long[::1] ids, double[::1] table, Py_ssize_t dim):
    """Componentwise mean of the `dim`-wide rows at `ids`; zeros when ids is empty."""
    cdef Py_ssize_t n_ids = ids.shape[0]
    cdef double* acc = <double*> malloc(dim * sizeof(double))
    if acc == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef long long base
    try:
        for j in range(dim):
            acc[j] = 0.0
        for i in range(n_ids):
            base = ids[i] * dim
            for j in range(dim):
                acc[j] += table[base + j]
        if n_ids == 0:
            return [acc[j] for j in range(dim)]
        return [acc[j] / n_ids for j in range(dim)]
    finally:
        free(acc)


def cosine(double[::1] a, double[::1] b):
    """Cosine similarity; 0.0 when either vector's norm falls below 1e-12."""
    if a.shape[0] != b.shape[0]:
        raise ValueError("dimension mismatch in cosine")
    cdef Py_ssize_t k, n = a.shape[0]
    cdef double dot = 0.0, na2 = 0.0, nb2 = 0.0, na, nb
    for k in range(n):
        dot += a[k] * b[k]
        na2 += a[k] * a[k]
        nb2 += b[k] * b[k]
    na = sqrt(na2)
    nb = sqrt(nb2)
    if na < 1e-12 or nb < 1e-12:
        return 0.0
    return dot / (na * nb)
