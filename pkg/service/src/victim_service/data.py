"""Synthetic sentiment corpus with matching attack resources.

`generate_world` writes a small, fully deterministic world into a directory:

 - train.jsonl / test.jsonl  — {"id", "text", "label"} per line, labels
   0=negative 1=positive, balanced and interleaved so any prefix keeps the
   same composition;
 - synonyms.tsv, sememes.tsv, pos.tsv — substitution resources for attack
   tooling (phrase TAB pos TAB cand|cand, word TAB tag|tag, word TAB POS);
 - embeddings.txt — static word vectors over the whole vocabulary;
 - linear_model.json — a bag-of-words linear classifier for the same world,
   in the JSON interchange format servers and attack clients both load;
 - manifest.json — seed, sizes, and composition counts.

Documents come in three kinds, interleaved 60/25/15. "synonym" documents
carry their sentiment in anchor words the synonym table maps to MILD
opposite-polarity words, so flipping them takes several substitutions.
"sememe" documents carry it in a single word the synonym table misses but
the sememe table pairs with a STRONG opposite, a one-word flip for methods
that use sememe candidates. "bigram" documents carry it in a two-word
phrase listed only as a bigram synonym entry. That split gives wider
candidate generators strictly more reach, which is the point of the corpus.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

LABEL_NAMES = ("negative", "positive")

FILLER = (
    "the", "a", "this", "that", "film", "movie", "story", "plot", "scene",
    "cast", "script", "acting", "pace", "tone", "ending", "music", "camera",
    "costume", "set", "mood", "theme", "shot", "cut", "frame", "montage",
    "audience", "critic", "review", "debut", "sequel",
)

# Anchors with synonym-table entries; their candidates are the MILD lists.
SYN_POS = ("superb", "wonderful", "excellent", "delightful", "charming",
           "stellar", "glorious", "radiant")
SYN_NEG = ("dreadful", "awful", "horrid", "dismal", "lousy", "woeful",
           "rotten", "bleak")
MILD_POS = ("pleasant", "tidy", "warm", "lively", "crisp", "neat")
MILD_NEG = ("tired", "flat", "shaky", "clumsy", "stale", "drab")

# Anchors the synonym table misses; the sememe table pairs each with its
# opposite number under a shared tag.
SEM_POS = ("luminous", "majestic", "sublime", "dazzling", "exquisite", "vibrant")
SEM_NEG = ("ghastly", "abysmal", "wretched", "dreary", "joyless", "grating")

# Two-word phrases listed only as bigram synonym entries; their component
# words appear nowhere else in the resources.
BIGRAM_POS = (("pure", "triumph"), ("rare", "gem"), ("grand", "spectacle"))
BIGRAM_NEG = (("utter", "failure"), ("total", "mess"), ("plain", "drivel"))

# Document kinds, interleaved in a fixed 20-slot cycle: 12/5/3 = 60/25/15.
KIND_SYNONYM = "synonym"
KIND_SEMEME = "sememe"
KIND_BIGRAM = "bigram"
_KIND_CYCLE = (KIND_SYNONYM,) * 12 + (KIND_SEMEME,) * 5 + (KIND_BIGRAM,) * 3

EMBED_DIM = 12

STRONG_WEIGHT = 2.5
MILD_WEIGHT = 1.0
PHRASE_WORD_WEIGHT = 1.6


def _adjectives() -> tuple[str, ...]:
    return SYN_POS + SYN_NEG + MILD_POS + MILD_NEG + SEM_POS + SEM_NEG


def vocabulary() -> tuple[str, ...]:
    """Every word the world can emit, sorted."""
    words = set(FILLER) | set(_adjectives())
    for pair in BIGRAM_POS + BIGRAM_NEG:
        words.update(pair)
    return tuple(sorted(words))


def _polarity(word: str) -> int:
    if word in SYN_POS or word in MILD_POS or word in SEM_POS:
        return 1
    if word in SYN_NEG or word in MILD_NEG or word in SEM_NEG:
        return -1
    for first, second in BIGRAM_POS:
        if word in (first, second):
            return 1
    for first, second in BIGRAM_NEG:
        if word in (first, second):
            return -1
    return 0


def _insert(tokens: list[str], rng: random.Random, *words: str) -> None:
    """Insert words as one contiguous run at a random position."""
    at = rng.randint(0, len(tokens))
    tokens[at:at] = list(words)


def _make_document(kind: str, label: int, rng: random.Random) -> str:
    tokens = list(rng.choices(FILLER, k=rng.randint(6, 10)))
    if kind == KIND_SYNONYM:
        anchors = SYN_POS if label == 1 else SYN_NEG
        milds = MILD_POS if label == 1 else MILD_NEG
        for word in rng.sample(anchors, rng.choice((2, 3))):
            _insert(tokens, rng, word)
        if rng.random() < 0.5:
            _insert(tokens, rng, rng.choice(milds))
    elif kind == KIND_SEMEME:
        anchors = SEM_POS if label == 1 else SEM_NEG
        _insert(tokens, rng, rng.choice(anchors))
    elif kind == KIND_BIGRAM:
        phrases = BIGRAM_POS if label == 1 else BIGRAM_NEG
        _insert(tokens, rng, *rng.choice(phrases))
    else:  # pragma: no cover - internal cycle only emits the three kinds
        raise ValueError(f"unknown document kind {kind!r}")
    return " ".join(tokens)


def _write_split(path: Path, split: str, size: int, seed: int) -> dict[str, int]:
    counts = {KIND_SYNONYM: 0, KIND_SEMEME: 0, KIND_BIGRAM: 0}
    width = max(4, len(str(size)))
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(size):
            kind = _KIND_CYCLE[i % len(_KIND_CYCLE)]
            label = i % 2
            rng = random.Random(f"{seed}:{split}:{i}")
            row = {
                "id": f"{split}-{i:0{width}d}",
                "label": label,
                "text": _make_document(kind, label, rng),
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")
            counts[kind] += 1
    return counts


def _synonym_lines() -> list[str]:
    lines = []
    for i, word in enumerate(SYN_POS):
        cands = sorted({MILD_NEG[i % len(MILD_NEG)], MILD_NEG[(i + 1) % len(MILD_NEG)]})
        lines.append(f"{word}\tADJ\t{'|'.join(cands)}")
    for i, word in enumerate(SYN_NEG):
        cands = sorted({MILD_POS[i % len(MILD_POS)], MILD_POS[(i + 1) % len(MILD_POS)]})
        lines.append(f"{word}\tADJ\t{'|'.join(cands)}")
    for pos_word, neg_word in zip(MILD_POS, MILD_NEG):
        lines.append(f"{pos_word}\tADJ\t{neg_word}")
        lines.append(f"{neg_word}\tADJ\t{pos_word}")
    for pos_pair, neg_pair in zip(BIGRAM_POS, BIGRAM_NEG):
        pos_key = "_".join(pos_pair)
        neg_key = "_".join(neg_pair)
        lines.append(f"{pos_key}\t*\t{neg_key}")
        lines.append(f"{neg_key}\t*\t{pos_key}")
    return lines


def _sememe_lines() -> list[str]:
    lines = []
    for i, (pos_word, neg_word) in enumerate(zip(SEM_POS, SEM_NEG)):
        lines.append(f"{pos_word}\taffect_{i}")
        lines.append(f"{neg_word}\taffect_{i}")
    return lines


def _pos_lines() -> list[str]:
    return [f"{word}\tADJ" for word in sorted(_adjectives())]


def _embedding_line(word: str, seed: int) -> str:
    rng = random.Random(f"{seed}:embed:{word}")
    vec = [rng.uniform(-0.4, 0.4) for _ in range(EMBED_DIM)]
    vec[0] += 1.2 * _polarity(word)
    if _polarity(word) == 0:
        vec[1] += 0.8  # filler words cluster away from the sentiment axis
    return word + " " + " ".join(f"{v:.6f}" for v in vec)


def _linear_model() -> dict:
    weights: dict[str, list[float]] = {}
    for word in SYN_POS + SEM_POS:
        weights[word] = [0.0, STRONG_WEIGHT]
    for word in SYN_NEG + SEM_NEG:
        weights[word] = [STRONG_WEIGHT, 0.0]
    for word in MILD_POS:
        weights[word] = [0.0, MILD_WEIGHT]
    for word in MILD_NEG:
        weights[word] = [MILD_WEIGHT, 0.0]
    for pair in BIGRAM_POS:
        for word in pair:
            weights[word] = [0.0, PHRASE_WORD_WEIGHT]
    for pair in BIGRAM_NEG:
        for word in pair:
            weights[word] = [PHRASE_WORD_WEIGHT, 0.0]
    return {
        "biases": [0.01, 0.0],
        "weights": weights,
        "temperature": 1.0,
        "label_names": list(LABEL_NAMES),
    }


def generate_world(out_dir, seed: int = 7, train_size: int = 2000, test_size: int = 400) -> dict:
    """Write the corpus, resources, embeddings, and linear model; return the manifest."""
    if train_size < 2 or test_size < 2:
        raise ValueError("train and test sizes must each be at least 2")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    train_counts = _write_split(out / "train.jsonl", "train", train_size, seed)
    test_counts = _write_split(out / "test.jsonl", "test", test_size, seed)

    (out / "synonyms.tsv").write_text(
        "# phrase<TAB>POS<TAB>candidate|candidate\n" + "\n".join(_synonym_lines()) + "\n",
        encoding="utf-8",
    )
    (out / "sememes.tsv").write_text(
        "# word<TAB>tag|tag\n" + "\n".join(_sememe_lines()) + "\n", encoding="utf-8"
    )
    (out / "pos.tsv").write_text(
        "# word<TAB>POS\n" + "\n".join(_pos_lines()) + "\n", encoding="utf-8"
    )
    (out / "embeddings.txt").write_text(
        "\n".join(_embedding_line(w, seed) for w in vocabulary()) + "\n", encoding="utf-8"
    )
    (out / "linear_model.json").write_text(
        json.dumps(_linear_model(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    manifest = {
        "seed": seed,
        "train_size": train_size,
        "test_size": test_size,
        "label_names": list(LABEL_NAMES),
        "vocabulary_size": len(vocabulary()),
        "train_composition": train_counts,
        "test_composition": test_counts,
        "files": [
            "train.jsonl", "test.jsonl", "synonyms.tsv", "sememes.tsv",
            "pos.tsv", "embeddings.txt", "linear_model.json",
        ],
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest
