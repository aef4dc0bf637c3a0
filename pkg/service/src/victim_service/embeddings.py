"""Static word embeddings and the mean-pooled sentence encoder they back.

The table loads from plain text, one `token v1 v2 ... vd` row per line
(UTF-8, `#` comments, blank lines ignored). A text encodes to the
componentwise mean of its in-vocabulary token vectors, accumulated left to
right in float64; out-of-vocabulary tokens are skipped and a text with no
known tokens encodes to the zero vector. The fixed operation order means
clients that load the same table locally reproduce these vectors bit for
bit.
"""

from __future__ import annotations

import math

from victim_service.tokens import norm_tokens


class EmbeddingTable:
    """Token vectors plus the mean-pooled text encoder."""

    def __init__(self, vocab: dict[str, int], table: list[float], dimension: int):
        self._vocab = vocab
        self._table = table
        self.dimension = dimension

    def __len__(self) -> int:
        return len(self._vocab)

    def __contains__(self, token: str) -> bool:
        return token.lower() in self._vocab

    @classmethod
    def from_file(cls, path) -> "EmbeddingTable":
        vocab: dict[str, int] = {}
        table: list[float] = []
        dimension = None
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) < 2:
                    raise ValueError(f"{path}:{line_no}: expected token and vector")
                token = parts[0].lower()
                if token in vocab:
                    raise ValueError(f"{path}:{line_no}: duplicate token {token!r}")
                try:
                    values = [float(v) for v in parts[1:]]
                except ValueError:
                    raise ValueError(f"{path}:{line_no}: non-numeric vector component") from None
                if not all(math.isfinite(v) for v in values):
                    raise ValueError(f"{path}:{line_no}: non-finite vector component")
                if dimension is None:
                    dimension = len(values)
                elif len(values) != dimension:
                    raise ValueError(
                        f"{path}:{line_no}: expected {dimension} components, got {len(values)}"
                    )
                vocab[token] = len(vocab)
                table.extend(values)
        if dimension is None:
            raise ValueError(f"{path}: no embedding rows")
        return cls(vocab, table, dimension)

    def encode(self, texts: list[str]) -> list[list[float]]:
        """One mean-pooled vector per text, in request order."""
        return [self._encode_one(text) for text in texts]

    def _encode_one(self, text: str) -> list[float]:
        dim = self.dimension
        acc = [0.0] * dim
        n = 0
        for token in norm_tokens(text):
            idx = self._vocab.get(token)
            if idx is None:
                continue
            base = idx * dim
            for j in range(dim):
                acc[j] += self._table[base + j]
            n += 1
        if n == 0:
            return acc
        return [a / n for a in acc]
