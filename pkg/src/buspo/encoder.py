"""Sentence encoders behind the semantic preservation score.

The default backend averages static word embeddings (plain-text table, one
token and its vector per line); an HTTP backend speaks POST /encode for
services that host a heavier sentence encoder. The score itself is the
cosine between the two sentence encodings.
"""

from __future__ import annotations

import math
from array import array

import requests

from buspo import _kernels
from buspo._http import ProtocolError, request_json
from buspo.core import Document, FormatError, detokenize, tokenize


def cosine_vectors(a, b) -> float:
    """Cosine of two equal-length vectors; 0.0 if either norm is < 1e-12."""
    return _kernels.cosine(array("d", a), array("d", b))


class StaticEncoder:
    """Mean of static word embeddings over in-vocabulary tokens.

    Out-of-vocabulary tokens are skipped; a text with no in-vocabulary
    tokens encodes to the zero vector.
    """

    def __init__(self, vocab: dict[str, int], table: array, dimension: int):
        self._vocab = vocab
        self._table = table
        self.dimension = dimension

    @classmethod
    def from_file(cls, path) -> "StaticEncoder":
        """Load a text embedding table: `token v1 v2 ... vd` per line."""
        vocab: dict[str, int] = {}
        table = array("d")
        dimension = None
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) < 2:
                    raise FormatError(path, line_no, "expected token and vector")
                token = parts[0].lower()
                if token in vocab:
                    raise FormatError(path, line_no, f"duplicate token {token!r}")
                try:
                    values = [float(v) for v in parts[1:]]
                except ValueError:
                    raise FormatError(path, line_no, "non-numeric vector component") from None
                if not all(math.isfinite(v) for v in values):
                    raise FormatError(path, line_no, "non-finite vector component")
                if dimension is None:
                    dimension = len(values)
                elif len(values) != dimension:
                    raise FormatError(
                        path, line_no, f"expected {dimension} components, got {len(values)}"
                    )
                vocab[token] = len(vocab)
                table.extend(values)
        if dimension is None:
            raise FormatError(path, 0, "no embedding rows")
        return cls(vocab, table, dimension)

    def _ids(self, text: str) -> array:
        ids = array("q")
        for surface in tokenize(text):
            idx = self._vocab.get(surface.lower())
            if idx is not None:
                ids.append(idx)
        return ids

    def encode_texts(self, texts: list[str]) -> list[list[float]]:
        return [
            _kernels.mean_rows(self._ids(t), self._table, self.dimension) for t in texts
        ]


class HttpEncoder:
    """Client for the encoder wire protocol: POST /encode."""

    def __init__(self, base_url: str, timeout: float = 30.0, session=None):
        self._url = base_url.rstrip("/")
        self._timeout = timeout
        self._session = session if session is not None else requests.Session()
        self.dimension: int | None = None  # learned from the first response

    def encode_texts(self, texts: list[str]) -> list[list[float]]:
        body = request_json(
            self._session, "POST", self._url + "/encode", {"texts": list(texts)}, self._timeout
        )
        if not isinstance(body, dict) or "vectors" not in body:
            raise ProtocolError(f"{self._url}/encode: missing vectors")
        rows = body["vectors"]
        if not isinstance(rows, list) or len(rows) != len(texts):
            raise ProtocolError(f"{self._url}/encode: expected {len(texts)} vectors")
        out = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or not row:
                raise ProtocolError(f"{self._url}/encode: vector {i} is not a list")
            try:
                vec = [float(v) for v in row]
            except (TypeError, ValueError) as exc:
                raise ProtocolError(f"{self._url}/encode: vector {i}: {exc}") from exc
            if not all(math.isfinite(v) for v in vec):
                raise ProtocolError(f"{self._url}/encode: vector {i} has non-finite values")
            if self.dimension is None:
                self.dimension = len(vec)
            elif len(vec) != self.dimension:
                raise ProtocolError(
                    f"{self._url}/encode: vector {i} has {len(vec)} dims, expected {self.dimension}"
                )
            out.append(vec)
        return out


def encode(encoder, doc: Document) -> list[float]:
    """Encode one document."""
    return encoder.encode_texts([detokenize(doc)])[0]


def use_score(encoder, original: Document, adversarial: Document) -> float:
    """Semantic preservation score: cosine of the two sentence encodings."""
    va, vb = encoder.encode_texts([detokenize(original), detokenize(adversarial)])
    return cosine_vectors(va, vb)


def encoder_from_spec(spec: str):
    """Build an encoder from a spec string.

    "static:PATH" loads a word-embedding table; "http://..." or "https://..."
    connects to an /encode endpoint.
    """
    if spec.startswith("static:"):
        path = spec[len("static:"):]
        if not path:
            raise ValueError("static: needs an embeddings path")
        return StaticEncoder.from_file(path)
    if spec.startswith(("http://", "https://")):
        return HttpEncoder(spec)
    raise ValueError(f"unrecognised encoder spec {spec!r}")
