"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the two hot paths (linear scoring + softmax, embedding mean + cosine)
over the same synthetic workload with both backends, checks the outputs are
bit-identical, and prints the throughput ratio.

Usage: python benchmarks/bench_kernels.py [--texts 2000] [--tokens 40] ...
"""

from __future__ import annotations

import argparse
import random
import time
from array import array

from buspo._kernels import pure

try:
    from buspo._kernels import _speedups
except ImportError:
    _speedups = None


def build_workload(rng, n_texts, n_tokens, vocab_size, n_classes, dim):
    weights = array("d", (rng.uniform(-2, 2) for _ in range(vocab_size * n_classes)))
    bias = array("d", (rng.uniform(-1, 1) for _ in range(n_classes)))
    table = array("d", (rng.uniform(-1, 1) for _ in range(vocab_size * dim)))
    texts = [
        array("q", (rng.randrange(vocab_size) for _ in range(n_tokens)))
        for _ in range(n_texts)
    ]
    return weights, bias, table, texts


def bench_linear(backend, weights, bias, texts, tau):
    start = time.perf_counter()
    out = [backend.linear_probs(ids, weights, bias, tau) for ids in texts]
    return time.perf_counter() - start, out


def bench_encode(backend, table, dim, texts):
    start = time.perf_counter()
    vectors = [array("d", backend.mean_rows(ids, table, dim)) for ids in texts]
    scores = [backend.cosine(vectors[0], v) for v in vectors]
    return time.perf_counter() - start, scores


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--texts", type=int, default=2000)
    parser.add_argument("--tokens", type=int, default=40)
    parser.add_argument("--vocab", type=int, default=5000)
    parser.add_argument("--classes", type=int, default=4)
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    weights, bias, table, texts = build_workload(
        rng, args.texts, args.tokens, args.vocab, args.classes, args.dim
    )

    backends = [("pure", pure)]
    if _speedups is not None:
        backends.append(("compiled", _speedups))
    else:
        print("compiled extension not available; benchmarking pure only")

    results = {}
    for name, backend in backends:
        best_linear = min(
            bench_linear(backend, weights, bias, texts, 1.0)[0]
            for _ in range(args.repeats)
        )
        best_encode = min(
            bench_encode(backend, table, args.dim, texts)[0]
            for _ in range(args.repeats)
        )
        _t, probs = bench_linear(backend, weights, bias, texts, 1.0)
        _t, scores = bench_encode(backend, table, args.dim, texts)
        results[name] = (best_linear, best_encode, probs, scores)
        print(
            f"{name:>8}: linear+softmax {args.texts / best_linear:>10.0f} texts/s   "
            f"encode+cosine {args.texts / best_encode:>10.0f} texts/s"
        )

    if _speedups is not None:
        p = results["pure"]
        c = results["compiled"]
        if p[2] != c[2] or p[3] != c[3]:
            print("MISMATCH: backends disagree")
            return 1
        print(
            f"backends agree bit-for-bit; speedup x{p[0] / c[0]:.1f} (linear), "
            f"x{p[1] / c[1]:.1f} (encode)"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
