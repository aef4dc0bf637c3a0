"""Numeric kernel selection: compiled extension when available, pure otherwise.

Set BUSPO_PURE_KERNELS=1 to force the pure backend (useful for benchmarking
and for verifying backend parity). Both backends implement the same float
operations in the same order and return bit-identical results.
"""

from __future__ import annotations

import os

if os.environ.get("BUSPO_PURE_KERNELS"):
    from buspo._kernels import pure as _backend
else:
    try:
        from buspo._kernels import _speedups as _backend  # type: ignore[no-redef]
    except ImportError:
        from buspo._kernels import pure as _backend

BACKEND = _backend.NAME

softmax = _backend.softmax
linear_probs = _backend.linear_probs
mean_rows = _backend.mean_rows
cosine = _backend.cosine

__all__ = ["BACKEND", "softmax", "linear_probs", "mean_rows", "cosine"]
