"""Core text types: tokens, documents, label distributions, attack configs.

Tokenization is deliberately simple and reversible: whitespace split, with
leading/trailing punctuation peeled off into standalone tokens. Everything
downstream (lexicon lookups, victim scoring, substitution) works on the
normalised (lowercased) forms and reassembles text with single spaces.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass

NOUN = "NOUN"
VERB = "VERB"
ADJ = "ADJ"
ADV = "ADV"
OTHER = "OTHER"

POS_TAGS = frozenset({NOUN, VERB, ADJ, ADV, OTHER})

U_SPO = "u-spo"
HU_SPO = "hu-spo"
BU_SPO = "bu-spo"
BU_SPOF = "bu-spof"
STATIC = "static"
RAND = "rand"
WSA = "wsa"

METHODS = (U_SPO, HU_SPO, BU_SPO, BU_SPOF, STATIC, RAND, WSA)

# Methods whose unigram candidate sets include sememe-derived words.
SEMEME_METHODS = frozenset({HU_SPO, BU_SPO, BU_SPOF})
# Methods that attempt bigram substitution first.
BIGRAM_METHODS = frozenset({BU_SPO, BU_SPOF})

_PUNCT = frozenset(string.punctuation)

# Function words excluded from unit emission when stopword skipping is on.
STOPWORDS = frozenset(
    """a an the and or but if then else for nor so yet of in on at by to from
    with about into over after under again once here there all any both each
    few more most other some such no not only own same than too very can will
    just is are was were be been being am do does did doing have has had
    having i me my we our you your he him his she her it its they them their
    this that these those what which who whom as until while during before
    up down out off above below between through""".split()
)


class FormatError(ValueError):
    """A malformed line in a resource or dataset file."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


@dataclass(frozen=True)
class Token:
    """One token of a document.

    Attributes:
        surface: The token as it appears in text.
        norm: Lowercased surface; all matching happens on this form.
        pos: Coarse part-of-speech tag, one of POS_TAGS.
        ne_type: Named-entity type (e.g. "PERSON") or None.
    """

    surface: str
    norm: str
    pos: str = OTHER
    ne_type: str | None = None

    def __post_init__(self):
        if not self.surface:
            raise ValueError("empty token surface")
        if self.norm != self.surface.lower():
            raise ValueError(f"norm {self.norm!r} is not lowercased {self.surface!r}")
        if self.pos not in POS_TAGS:
            raise ValueError(f"unknown POS tag {self.pos!r}")

    @property
    def is_punctuation(self) -> bool:
        return all(c in _PUNCT for c in self.surface)


@dataclass(frozen=True)
class Document:
    """A labelled document as a token sequence."""

    id: str
    tokens: tuple[Token, ...]
    gold_label: int

    def __post_init__(self):
        if not self.tokens:
            raise ValueError(f"document {self.id!r} has no tokens")
        if self.gold_label < 0:
            raise ValueError(f"document {self.id!r}: negative gold label")

    @property
    def norms(self) -> tuple[str, ...]:
        return tuple(t.norm for t in self.tokens)


@dataclass(frozen=True)
class LabelDistribution:
    """A probability distribution over class labels."""

    probs: tuple[float, ...]

    def __post_init__(self):
        if not self.probs:
            raise ValueError("empty label distribution")
        total = 0.0
        for p in self.probs:
            if not (p >= 0.0):  # also rejects NaN
                raise ValueError(f"invalid probability {p!r}")
            total += p
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    def __len__(self) -> int:
        return len(self.probs)


def argmax_label(dist: LabelDistribution) -> int:
    """Index of the largest probability; ties resolve to the lowest index."""
    best = 0
    for k in range(1, len(dist.probs)):
        if dist.probs[k] > dist.probs[best]:
            best = k
    return best


@dataclass(frozen=True)
class AttackConfig:
    """Settings shared by every attack method.

    target_label None means untargeted (flip away from gold); an integer
    means targeted (drive the prediction to that label).
    """

    method: str = BU_SPO
    max_replacements: int = 20
    target_label: int | None = None
    stopword_skip: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.max_replacements < 1:
            raise ValueError("max_replacements must be >= 1")
        if self.target_label is not None and self.target_label < 0:
            raise ValueError("target_label must be a label index")

    @property
    def targeted(self) -> bool:
        return self.target_label is not None


def tokenize(text: str) -> list[str]:
    """Split text on whitespace, peeling boundary punctuation into own tokens.

    "Hello, world!" -> ["Hello", ",", "world", "!"]. Interior punctuation
    (don't, U.S) stays attached.
    """
    out: list[str] = []
    for chunk in text.split():
        start = 0
        end = len(chunk)
        while start < end and chunk[start] in _PUNCT:
            start += 1
        while end > start and chunk[end - 1] in _PUNCT:
            end -= 1
        out.extend(chunk[:start])
        if start < end:
            out.append(chunk[start:end])
        out.extend(chunk[end:])
    return out


def plain_tokens(text: str) -> tuple[Token, ...]:
    """Tokenize without any POS/NE annotation (all tokens tagged OTHER)."""
    return tuple(Token(surface=s, norm=s.lower()) for s in tokenize(text))


def detokenize(doc: Document) -> str:
    return " ".join(t.surface for t in doc.tokens)


def _match_case(word: str, exemplar: str) -> str:
    # Copy only the leading-capital convention; lexicon entries are lowercase.
    if exemplar[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def substitute_spans(
    doc: Document, replacements: list[tuple[int, int, str]]
) -> Document:
    """Replace token spans of `doc` with (lowercase) substitute phrases.

    Each replacement is (start, end, phrase) with an exclusive end index;
    spans must be pairwise disjoint. Multi-word phrases are space-separated
    and may differ in length from the span they replace. Substituted tokens
    take their casing cue from the original span position-by-position and are
    tagged OTHER.
    """
    tokens = list(doc.tokens)
    for start, end, phrase in sorted(replacements, reverse=True):
        if not (0 <= start < end <= len(doc.tokens)):
            raise ValueError(f"span ({start}, {end}) out of range")
        words = phrase.split()
        if not words:
            raise ValueError("empty substitute phrase")
        new_tokens = []
        for k, word in enumerate(words):
            exemplar = doc.tokens[min(start + k, end - 1)].surface
            surface = _match_case(word, exemplar)
            new_tokens.append(Token(surface=surface, norm=surface.lower()))
        tokens[start:end] = new_tokens
    return Document(id=doc.id, tokens=tuple(tokens), gold_label=doc.gold_label)


def read_dataset(path) -> list[dict]:
    """Read a JSONL dataset of {"id", "text", "label"} records.

    Returns the raw records; Document construction happens lexicon-side where
    POS/NE annotation is available. Malformed lines raise FormatError with
    the offending line number.
    """
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(path, line_no, f"invalid JSON: {exc}") from exc
            if not isinstance(rec, dict):
                raise FormatError(path, line_no, "record is not an object")
            missing = {"id", "text", "label"} - rec.keys()
            if missing:
                raise FormatError(path, line_no, f"missing fields {sorted(missing)}")
            if not isinstance(rec["id"], str) or not rec["id"]:
                raise FormatError(path, line_no, "id must be a non-empty string")
            if not isinstance(rec["text"], str) or not rec["text"].strip():
                raise FormatError(path, line_no, "text must be a non-empty string")
            if not isinstance(rec["label"], int) or isinstance(rec["label"], bool):
                raise FormatError(path, line_no, "label must be an integer")
            if rec["label"] < 0:
                raise FormatError(path, line_no, "label must be >= 0")
            records.append({"id": rec["id"], "text": rec["text"], "label": rec["label"]})
    return records
