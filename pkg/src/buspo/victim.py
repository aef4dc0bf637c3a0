"""Victim classifier access: in-process linear model and HTTP wire client.

Both backends answer the same question (text -> label distribution) behind
one query-counted handle, so attack code never knows which it is talking to.
"""

from __future__ import annotations

import json
import math
import threading
from array import array

import requests

from buspo import _kernels
from buspo._http import ProtocolError, TransportError, VictimError, request_json
from buspo.core import Document, LabelDistribution, detokenize, tokenize

__all__ = [
    "VictimError",
    "TransportError",
    "ProtocolError",
    "score_softmax",
    "LinearTextModel",
    "HttpClassifier",
    "ClassifierHandle",
    "ScopedClassifier",
    "classify_batch",
    "handle_from_spec",
]


def score_softmax(scores, temperature: float = 1.0) -> LabelDistribution:
    """Softmax over raw scores with max subtraction.

    Non-finite scores and non-positive temperatures are errors; the max
    subtraction keeps large scores from overflowing.
    """
    if not (math.isfinite(temperature) and temperature > 0):
        raise ValueError(f"temperature must be a positive finite number, got {temperature!r}")
    probs = _kernels.softmax(array("d", scores), float(temperature))
    return LabelDistribution(probs=tuple(probs))


class LinearTextModel:
    """Bag-of-words linear scorer with a temperature softmax.

    score_k(text) = bias_k + sum of weights[token][k] over tokens the model
    knows; unknown tokens contribute nothing. Matching happens on lowercased
    tokens of the standard tokenization.
    """

    def __init__(self, biases, weights: dict, temperature: float = 1.0, label_names=None):
        k_count = len(biases)
        if k_count < 2:
            raise ValueError("a classifier needs at least 2 labels")
        if not all(math.isfinite(b) for b in biases):
            raise ValueError("non-finite bias")
        if not (math.isfinite(temperature) and temperature > 0):
            raise ValueError("temperature must be a positive finite number")
        self._bias = array("d", (float(b) for b in biases))
        self._tau = float(temperature)
        self._vocab: dict[str, int] = {}
        flat = array("d")
        for word in sorted(weights):
            row = weights[word]
            if len(row) != k_count:
                raise ValueError(f"weight row for {word!r} has {len(row)} entries, expected {k_count}")
            if not all(math.isfinite(v) for v in row):
                raise ValueError(f"non-finite weight for {word!r}")
            self._vocab[word] = len(self._vocab)
            flat.extend(float(v) for v in row)
        self._weights = flat
        if label_names is None:
            label_names = [f"class_{k}" for k in range(k_count)]
        if len(label_names) != k_count:
            raise ValueError("label_names length does not match biases")
        self.num_labels = k_count
        self.label_names = list(label_names)

    @classmethod
    def from_json(cls, path) -> "LinearTextModel":
        with open(path, encoding="utf-8") as fh:
            try:
                blob = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: invalid JSON: {exc}") from exc
        for key in ("biases", "weights"):
            if key not in blob:
                raise ValueError(f"{path}: missing {key!r}")
        if not isinstance(blob["weights"], dict):
            raise ValueError(f"{path}: weights must map word -> score list")
        return cls(
            biases=blob["biases"],
            weights=blob["weights"],
            temperature=blob.get("temperature", 1.0),
            label_names=blob.get("label_names"),
        )

    def _ids(self, text: str) -> array:
        ids = array("q")
        for surface in tokenize(text):
            idx = self._vocab.get(surface.lower())
            if idx is not None:
                ids.append(idx)
        return ids

    def classify_texts(self, texts: list[str]) -> list[LabelDistribution]:
        out = []
        for text in texts:
            probs = _kernels.linear_probs(self._ids(text), self._weights, self._bias, self._tau)
            out.append(LabelDistribution(probs=tuple(probs)))
        return out


class HttpClassifier:
    """Client for the classifier wire protocol: GET /info, POST /classify."""

    def __init__(self, base_url: str, timeout: float = 30.0, session=None):
        self._url = base_url.rstrip("/")
        self._timeout = timeout
        self._session = session if session is not None else requests.Session()
        info = self._request("GET", "/info")
        if not isinstance(info, dict):
            raise ProtocolError(f"{self._url}/info: body is not an object")
        num_labels = info.get("num_labels")
        label_names = info.get("label_names")
        if not isinstance(num_labels, int) or num_labels < 2:
            raise ProtocolError(f"{self._url}/info: bad num_labels {num_labels!r}")
        if (
            not isinstance(label_names, list)
            or len(label_names) != num_labels
            or not all(isinstance(n, str) for n in label_names)
        ):
            raise ProtocolError(f"{self._url}/info: bad label_names")
        self.num_labels = num_labels
        self.label_names = label_names

    def _request(self, method: str, path: str, payload=None):
        return request_json(self._session, method, self._url + path, payload, self._timeout)

    def classify_texts(self, texts: list[str]) -> list[LabelDistribution]:
        body = self._request("POST", "/classify", {"texts": list(texts)})
        if not isinstance(body, dict) or "probabilities" not in body:
            raise ProtocolError(f"{self._url}/classify: missing probabilities")
        rows = body["probabilities"]
        if not isinstance(rows, list) or len(rows) != len(texts):
            raise ProtocolError(
                f"{self._url}/classify: expected {len(texts)} rows, got "
                f"{len(rows) if isinstance(rows, list) else type(rows).__name__}"
            )
        out = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != self.num_labels:
                raise ProtocolError(f"{self._url}/classify: row {i} has wrong length")
            try:
                dist = LabelDistribution(probs=tuple(float(p) for p in row))
            except (TypeError, ValueError) as exc:
                raise ProtocolError(f"{self._url}/classify: row {i}: {exc}") from exc
            out.append(dist)
        return out


class ClassifierHandle:
    """Query-counted access to a classifier backend.

    query_counter counts every text actually scored by the backend, exactly
    and atomically. The optional response cache (off by default) answers
    repeat texts locally; hits are tallied separately and never counted as
    queries.
    """

    def __init__(self, backend, cache: bool = False):
        if backend.num_labels < 2:
            raise ValueError("a classifier needs at least 2 labels")
        self._backend = backend
        self._lock = threading.Lock()
        self.query_counter = 0
        self.cache_hits = 0
        self._cache: dict[str, LabelDistribution] | None = {} if cache else None

    @property
    def num_labels(self) -> int:
        return self._backend.num_labels

    @property
    def label_names(self) -> list[str]:
        return self._backend.label_names

    def _classify_counting(self, texts: list[str]) -> tuple[list[LabelDistribution], int]:
        """Classify and report how many texts this call actually scored."""
        texts = list(texts)
        if self._cache is None:
            dists = self._backend.classify_texts(texts)
            with self._lock:
                self.query_counter += len(texts)
            return dists, len(texts)
        with self._lock:
            found = {t: self._cache[t] for t in texts if t in self._cache}
        misses: list[str] = []
        for t in texts:
            if t not in found and t not in misses:
                misses.append(t)
        if misses:
            fresh = self._backend.classify_texts(misses)
            with self._lock:
                self.query_counter += len(misses)
                self._cache.update(zip(misses, fresh))
            found.update(zip(misses, fresh))
        with self._lock:
            self.cache_hits += len(texts) - len(misses)
        return [found[t] for t in texts], len(misses)

    def classify_texts(self, texts: list[str]) -> list[LabelDistribution]:
        return self._classify_counting(texts)[0]

    def classify_documents(self, docs: list[Document]) -> list[LabelDistribution]:
        return self.classify_texts([detokenize(d) for d in docs])

    def scope(self) -> "ScopedClassifier":
        """A view with its own query counter, for per-attack accounting."""
        return ScopedClassifier(self)


class ScopedClassifier:
    """Counts queries for one attack while feeding the parent handle."""

    def __init__(self, parent: ClassifierHandle):
        self._parent = parent
        self.query_counter = 0

    @property
    def num_labels(self) -> int:
        return self._parent.num_labels

    @property
    def label_names(self) -> list[str]:
        return self._parent.label_names

    def classify_texts(self, texts: list[str]) -> list[LabelDistribution]:
        dists, scored = self._parent._classify_counting(texts)
        self.query_counter += scored
        return dists

    def _classify_counting(self, texts: list[str]) -> tuple[list[LabelDistribution], int]:
        dists, scored = self._parent._classify_counting(texts)
        self.query_counter += scored
        return dists, scored

    def classify_documents(self, docs: list[Document]) -> list[LabelDistribution]:
        return self.classify_texts([detokenize(d) for d in docs])

    def scope(self) -> "ScopedClassifier":
        return ScopedClassifier(self)


def classify_batch(handle, documents: list[Document]) -> list[LabelDistribution]:
    """Classify documents in order; the counter grows by len(documents)."""
    return handle.classify_documents(documents)


def handle_from_spec(spec: str, cache: bool = False) -> ClassifierHandle:
    """Build a handle from a victim spec string.

    "builtin:linear:PATH" loads a linear model file; "http://..." or
    "https://..." connects to a wire-protocol endpoint.
    """
    if spec.startswith("builtin:linear:"):
        path = spec[len("builtin:linear:"):]
        if not path:
            raise ValueError("builtin:linear: needs a model path")
        return ClassifierHandle(LinearTextModel.from_json(path), cache=cache)
    if spec.startswith(("http://", "https://")):
        return ClassifierHandle(HttpClassifier(spec), cache=cache)
    raise ValueError(f"unrecognised victim spec {spec!r}")
