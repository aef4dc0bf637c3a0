"""Small text classifiers: word-CNN, LSTM, and BiLSTM.

Training is reproducible given a seed (single-threaded torch, seeded init
and shuffling, pinned Adam hyperparameters). Serving is deterministic: one
forward pass per text in eval mode (dropout off, no cross-text padding), and
probabilities come from a float64 max-subtracted softmax over the logits, so
repeated and re-batched requests return identical rows.
"""

from __future__ import annotations

import json
import random

import torch
from torch import nn

from victim_service.linear import softmax
from victim_service.tokens import norm_tokens

ARCHITECTURES = ("word-cnn", "lstm", "bilstm")

# (embedding dim, feature maps or recurrent units). Desk-scale trains in
# seconds on a laptop CPU; --full-size switches to the larger research sizes.
DESK_SIZES = {"word-cnn": (50, 64), "lstm": (50, 64), "bilstm": (50, 64)}
FULL_SIZES = {"word-cnn": (50, 250), "lstm": (100, 128), "bilstm": (128, 64)}

KERNEL_SIZES = (3, 4, 5)
DROPOUT = 0.3
ADAM_OPTIONS = {"lr": 0.001, "betas": (0.9, 0.999), "eps": 1e-7}
BATCH_SIZE = 64
MIN_DOCUMENTS = 20

PAD_ID = 0
UNK_ID = 1


def load_jsonl(path) -> list[dict]:
    """Read a {"id","text","label"} dataset; raise ValueError on bad rows."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            if not isinstance(row, dict):
                raise ValueError(f"{path}:{line_no}: row is not an object")
            for key in ("id", "text", "label"):
                if key not in row:
                    raise ValueError(f"{path}:{line_no}: missing {key!r}")
            if not isinstance(row["text"], str):
                raise ValueError(f"{path}:{line_no}: text must be a string")
            if not isinstance(row["label"], int) or isinstance(row["label"], bool):
                raise ValueError(f"{path}:{line_no}: label must be an integer")
            if row["label"] < 0:
                raise ValueError(f"{path}:{line_no}: label must be >= 0")
            docs.append({"id": str(row["id"]), "text": row["text"], "label": row["label"]})
    return docs


def _infer_labels(docs: list[dict]) -> int:
    """Number of classes: max label + 1, every class required to appear."""
    seen = {doc["label"] for doc in docs}
    num_labels = max(seen) + 1
    if num_labels < 2:
        raise ValueError("dataset has a single class; a classifier needs at least 2")
    missing = sorted(set(range(num_labels)) - seen)
    if missing:
        raise ValueError(f"labels {missing} never appear; classes must be 0..{num_labels - 1}")
    return num_labels


def _build_vocab(docs: list[dict]) -> dict[str, int]:
    words = set()
    for doc in docs:
        words.update(norm_tokens(doc["text"]))
    vocab = {}
    for word in sorted(words):
        vocab[word] = len(vocab) + 2  # 0 = padding, 1 = unknown
    return vocab


class _WordCNN(nn.Module):
    def __init__(self, vocab_size: int, num_labels: int, embed_dim: int, filters: int):
        super().__init__()
        self.embedding = nn.Embedding(vocab_size, embed_dim, padding_idx=PAD_ID)
        self.convs = nn.ModuleList(
            nn.Conv1d(embed_dim, filters, k) for k in KERNEL_SIZES
        )
        self.dropout = nn.Dropout(DROPOUT)
        self.fc = nn.Linear(filters * len(KERNEL_SIZES), num_labels)

    def forward(self, ids: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        del lengths  # padded positions embed to zeros; max pooling sees them all
        embedded = self.embedding(ids).transpose(1, 2)  # (batch, embed, time)
        pooled = [torch.relu(conv(embedded)).amax(dim=2) for conv in self.convs]
        return self.fc(self.dropout(torch.cat(pooled, dim=1)))


class _Recurrent(nn.Module):
    def __init__(
        self,
        vocab_size: int,
        num_labels: int,
        embed_dim: int,
        units: int,
        bidirectional: bool,
    ):
        super().__init__()
        self.embedding = nn.Embedding(vocab_size, embed_dim, padding_idx=PAD_ID)
        self.lstm = nn.LSTM(embed_dim, units, batch_first=True, bidirectional=bidirectional)
        self.dropout = nn.Dropout(DROPOUT)
        self.fc = nn.Linear(units * (2 if bidirectional else 1), num_labels)
        self._bidirectional = bidirectional

    def forward(self, ids: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        embedded = self.embedding(ids)
        packed = nn.utils.rnn.pack_padded_sequence(
            embedded, lengths, batch_first=True, enforce_sorted=False
        )
        _, (hidden, _) = self.lstm(packed)
        if self._bidirectional:
            state = torch.cat([hidden[-2], hidden[-1]], dim=1)
        else:
            state = hidden[-1]
        return self.fc(self.dropout(state))


def _build_module(architecture: str, vocab_size: int, num_labels: int, full_size: bool):
    embed_dim, hidden = (FULL_SIZES if full_size else DESK_SIZES)[architecture]
    return _rebuild_module(architecture, vocab_size, num_labels, embed_dim, hidden), embed_dim, hidden


def _min_length(architecture: str) -> int:
    return max(KERNEL_SIZES) if architecture == "word-cnn" else 1


class TorchTextClassifier:
    """A trained model behind the classify() serving interface."""

    def __init__(self, module, architecture, embed_dim, hidden, vocab, label_names):
        torch.set_num_threads(1)  # keeps reductions deterministic across calls
        self._module = module.eval()
        for param in self._module.parameters():
            param.requires_grad_(False)
        self.architecture = architecture
        self.embed_dim = embed_dim
        self.hidden = hidden
        self._vocab = dict(vocab)
        self.label_names = list(label_names)
        self.num_labels = len(self.label_names)
        self._pad_to = _min_length(architecture)

    def _ids(self, text: str) -> list[int]:
        ids = [self._vocab.get(token, UNK_ID) for token in norm_tokens(text)]
        if len(ids) < self._pad_to:
            ids = ids + [PAD_ID] * (self._pad_to - len(ids))
        return ids

    def logits(self, text: str) -> list[float]:
        """The raw scores for one text, one unpadded forward pass."""
        ids = self._ids(text)
        with torch.no_grad():
            batch = torch.tensor([ids], dtype=torch.long)
            lengths = torch.tensor([len(ids)], dtype=torch.long)
            out = self._module(batch, lengths)
        return [float(v) for v in out[0]]

    def classify(self, texts: list[str]) -> list[list[float]]:
        """One probability row per text, rows in request order."""
        return [softmax(self.logits(text), 1.0) for text in texts]

    def save(self, path) -> None:
        torch.save(
            {
                "format": 1,
                "architecture": self.architecture,
                "embed_dim": self.embed_dim,
                "hidden": self.hidden,
                "vocab_words": [w for w, _ in sorted(self._vocab.items(), key=lambda k: k[1])],
                "label_names": self.label_names,
                "state_dict": self._module.state_dict(),
            },
            path,
        )

    @classmethod
    def load(cls, path) -> "TorchTextClassifier":
        try:
            blob = torch.load(path, map_location="cpu")
        except Exception as exc:
            raise ValueError(f"{path}: cannot load model: {exc}") from exc
        if not isinstance(blob, dict) or blob.get("format") != 1:
            raise ValueError(f"{path}: not a victim-service model file")
        architecture = blob["architecture"]
        if architecture not in ARCHITECTURES:
            raise ValueError(f"{path}: unknown architecture {architecture!r}")
        vocab = {word: i + 2 for i, word in enumerate(blob["vocab_words"])}
        num_labels = len(blob["label_names"])
        module = _rebuild_module(
            architecture, len(vocab) + 2, num_labels, blob["embed_dim"], blob["hidden"]
        )
        module.load_state_dict(blob["state_dict"])
        return cls(
            module, architecture, blob["embed_dim"], blob["hidden"], vocab, blob["label_names"]
        )


def _rebuild_module(architecture, vocab_size, num_labels, embed_dim, hidden):
    if architecture == "word-cnn":
        return _WordCNN(vocab_size, num_labels, embed_dim, hidden)
    if architecture == "lstm":
        return _Recurrent(vocab_size, num_labels, embed_dim, hidden, bidirectional=False)
    return _Recurrent(vocab_size, num_labels, embed_dim, hidden, bidirectional=True)


def _batch_tensors(docs, vocab, architecture):
    """Pad a batch to its longest text (and the CNN's minimum window)."""
    id_rows = []
    for doc in docs:
        ids = [vocab.get(token, UNK_ID) for token in norm_tokens(doc["text"])]
        id_rows.append(ids)
    width = max(_min_length(architecture), max((len(r) for r in id_rows), default=1), 1)
    lengths = [max(1, min(len(r), width)) for r in id_rows]
    padded = [r + [PAD_ID] * (width - len(r)) for r in id_rows]
    return (
        torch.tensor(padded, dtype=torch.long),
        torch.tensor(lengths, dtype=torch.long),
        torch.tensor([doc["label"] for doc in docs], dtype=torch.long),
    )


def _accuracy(classifier: TorchTextClassifier, docs: list[dict]) -> float:
    correct = 0
    for doc in docs:
        row = classifier.classify([doc["text"]])[0]
        predicted = 0
        for k in range(1, len(row)):
            if row[k] > row[predicted]:
                predicted = k
        if predicted == doc["label"]:
            correct += 1
    return correct / len(docs)


def _majority_share(docs: list[dict]) -> float:
    counts: dict[int, int] = {}
    for doc in docs:
        counts[doc["label"]] = counts.get(doc["label"], 0) + 1
    return max(counts.values()) / len(docs)


def train(
    train_docs: list[dict],
    *,
    architecture: str = "word-cnn",
    seed: int = 0,
    epochs: int = 4,
    full_size: bool = False,
    label_names: list[str] | None = None,
    test_docs: list[dict] | None = None,
) -> tuple[TorchTextClassifier, dict]:
    """Train a classifier; return it with its metrics dict.

    Reproducible given the seed: same data and seed, same weights.
    """
    if architecture not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {architecture!r}; pick one of {ARCHITECTURES}")
    if epochs < 1:
        raise ValueError("epochs must be at least 1")
    if len(train_docs) < MIN_DOCUMENTS:
        raise ValueError(
            f"dataset too small: {len(train_docs)} documents, need at least {MIN_DOCUMENTS}"
        )
    num_labels = _infer_labels(train_docs)
    if label_names is None:
        label_names = [f"class_{k}" for k in range(num_labels)]
    if len(label_names) != num_labels:
        raise ValueError(
            f"{len(label_names)} label names for {num_labels} classes inferred from the labels"
        )
    if test_docs is not None:
        for doc in test_docs:
            if doc["label"] >= num_labels:
                raise ValueError(
                    f"test label {doc['label']} out of range for {num_labels} classes"
                )

    torch.set_num_threads(1)
    torch.manual_seed(seed)
    vocab = _build_vocab(train_docs)
    module, embed_dim, hidden = _build_module(
        architecture, len(vocab) + 2, num_labels, full_size
    )
    optimizer = torch.optim.Adam(module.parameters(), **ADAM_OPTIONS)
    loss_fn = nn.CrossEntropyLoss()

    module.train()
    for epoch in range(epochs):
        order = list(range(len(train_docs)))
        random.Random(f"{seed}:epoch:{epoch}").shuffle(order)
        for at in range(0, len(order), BATCH_SIZE):
            batch = [train_docs[i] for i in order[at : at + BATCH_SIZE]]
            ids, lengths, labels = _batch_tensors(batch, vocab, architecture)
            optimizer.zero_grad()
            loss = loss_fn(module(ids, lengths), labels)
            loss.backward()
            optimizer.step()

    classifier = TorchTextClassifier(
        module, architecture, embed_dim, hidden, vocab, label_names
    )
    metrics = {
        "architecture": architecture,
        "seed": seed,
        "epochs": epochs,
        "full_size": full_size,
        "num_labels": num_labels,
        "vocab_size": len(vocab),
        "train_documents": len(train_docs),
        "train_accuracy": _accuracy(classifier, train_docs),
        "majority_baseline": _majority_share(test_docs if test_docs else train_docs),
    }
    if test_docs:
        metrics["test_documents"] = len(test_docs)
        metrics["test_accuracy"] = _accuracy(classifier, test_docs)
    return classifier, metrics


def train_from_files(
    dataset_path,
    *,
    architecture: str = "word-cnn",
    seed: int = 0,
    epochs: int = 4,
    full_size: bool = False,
    label_names: list[str] | None = None,
    test_path=None,
) -> tuple[TorchTextClassifier, dict]:
    train_docs = load_jsonl(dataset_path)
    test_docs = load_jsonl(test_path) if test_path else None
    return train(
        train_docs,
        architecture=architecture,
        seed=seed,
        epochs=epochs,
        full_size=full_size,
        label_names=label_names,
        test_docs=test_docs,
    )
