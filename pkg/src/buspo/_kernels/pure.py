"""Pure-Python kernels, the fallback when the compiled extension is absent.

Every routine here performs the same floating-point operations in the same
order as `_speedups.pyx`, so the two backends return bit-identical results.
Keep them in lockstep when editing either.
"""

from __future__ import annotations

import math

NAME = "pure"


def softmax(scores, tau):
    """Softmax with max subtraction; temperature tau divides the shifted scores."""
    m = None
    for s in scores:
        if not math.isfinite(s):
            raise ValueError("non-finite score in softmax")
        if m is None or s > m:
            m = s
    exps = []
    total = 0.0
    for s in scores:
        e = math.exp((s - m) / tau)
        exps.append(e)
        total += e
    return [e / total for e in exps]


def linear_probs(ids, weights, bias, tau):
    """Class probabilities of a bag of word ids under a flat K-per-word weight table."""
    k_count = len(bias)
    scores = list(bias)
    for i in ids:
        base = i * k_count
        for k in range(k_count):
            scores[k] += weights[base + k]
    return softmax(scores, tau)


def mean_rows(ids, table, dim):
    """Componentwise mean of the `dim`-wide rows at `ids`; zeros when ids is empty."""
    acc = [0.0] * dim
    n = 0
    for i in ids:
        base = i * dim
        for j in range(dim):
            acc[j] += table[base + j]
        n += 1
    if n == 0:
        return acc
    return [a / n for a in acc]


def cosine(a, b):
    """Cosine similarity; 0.0 when either vector's norm falls below 1e-12."""
    if len(a) != len(b):
        raise ValueError("dimension mismatch in cosine")
    dot = 0.0
    na2 = 0.0
    nb2 = 0.0
    for x, y in zip(a, b):
        dot += x * y
        na2 += x * x
        nb2 += y * y
    na = math.sqrt(na2)
    nb = math.sqrt(nb2)
    if na < 1e-12 or nb < 1e-12:
        return 0.0
    return dot / (na * nb)
