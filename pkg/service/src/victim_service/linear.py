"""Serving mode for linear bag-of-words model files.

The file format is the JSON interchange format attack tooling consumes
directly: {"biases": [...], "weights": {"word": [...]}, "temperature": 1.0,
"label_names": [...]}. Scoring is score_k(text) = bias_k + sum of
weights[token][k] over known lowercased tokens, followed by a temperature
softmax. The arithmetic runs in float64 with a fixed operation order
(vocabulary sorted, tokens accumulated left to right, max-subtracted
softmax), so a given text always yields the same bits — and because JSON
serialises doubles losslessly, a client scoring the same file in process
sees identical probabilities over HTTP.
"""

from __future__ import annotations

import json
import math

from victim_service.tokens import norm_tokens


class LinearJsonModel:
    """Bag-of-words linear scorer with a temperature softmax."""

    def __init__(self, biases, weights: dict, temperature: float = 1.0, label_names=None):
        k_count = len(biases)
        if k_count < 2:
            raise ValueError("a classifier needs at least 2 labels")
        if not all(math.isfinite(float(b)) for b in biases):
            raise ValueError("non-finite bias")
        temperature = float(temperature)
        if not (math.isfinite(temperature) and temperature > 0):
            raise ValueError("temperature must be a positive finite number")
        self._bias = [float(b) for b in biases]
        self._tau = temperature
        self._vocab: dict[str, int] = {}
        flat: list[float] = []
        for word in sorted(weights):
            row = weights[word]
            if len(row) != k_count:
                raise ValueError(
                    f"weight row for {word!r} has {len(row)} entries, expected {k_count}"
                )
            if not all(math.isfinite(float(v)) for v in row):
                raise ValueError(f"non-finite weight for {word!r}")
            self._vocab[word] = len(self._vocab)
            flat.extend(float(v) for v in row)
        self._weights = flat
        if label_names is None:
            label_names = [f"class_{k}" for k in range(k_count)]
        if len(label_names) != k_count:
            raise ValueError("label_names length does not match biases")
        self.num_labels = k_count
        self.label_names = [str(n) for n in label_names]

    @classmethod
    def from_json(cls, path) -> "LinearJsonModel":
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

    def _scores(self, text: str) -> list[float]:
        k_count = self.num_labels
        scores = list(self._bias)
        for token in norm_tokens(text):
            idx = self._vocab.get(token)
            if idx is None:
                continue
            base = idx * k_count
            for k in range(k_count):
                scores[k] += self._weights[base + k]
        return scores

    def classify(self, texts: list[str]) -> list[list[float]]:
        """One probability row per text, rows in request order."""
        return [softmax(self._scores(text), self._tau) for text in texts]


def softmax(scores: list[float], tau: float = 1.0) -> list[float]:
    """Max-subtracted temperature softmax in float64."""
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
