"""Shared test data and stand-ins: substitution resources, mock victims.

Lives outside conftest.py so test modules can import it by a basename that
stays unambiguous when this suite runs together with service/tests (both
directories end up on sys.path, so only unique basenames are safe to
import).

The resource files here are tiny but exercise every lookup rule: multi-word
synonym entries, POS-restricted entries, sememe tag overlaps, ambiguous and
tied named entities, and POS suffix fallbacks. The linear victim weights are
chosen so that specific substitutions flip specific fixture texts, which keeps
every expected outcome computable by hand (argmax of a linear score).
"""

from __future__ import annotations

import json

from buspo.victim import LinearTextModel

SYNONYMS_TSV = """\
# phrase	pos	candidates
new_york	*	empire_state|big_apple
machine_learning	*	data_mining
learning_curve	*	growth_curve
primary_school	*	elementary_school
good	ADJ	honorable|sound
large	ADJ	big|great
well	*	nicely|soundly
film	NOUN	movie
"""

SEMEMES_TSV = """\
good	quality|virtue
sound	quality
upright	virtue
large	size
big	size
huge	size
"""

NE_TSV = """\
bush	PERSON	3	7
dubyuh	PERSON	0	5
clinton	PERSON	1	3
nasdaq	ORG	2	9
nyse	ORG	2	9
new_york	LOC	0	4
big_apple	LOC	1	2
"""

POS_TSV = """\
good	ADJ
sound	ADJ
honorable	ADJ
upright	ADJ
large	ADJ
big	ADJ
great	ADJ
huge	ADJ
well	ADV
film	NOUN
movie	NOUN
plot	NOUN
story	NOUN
acting	NOUN
"""

EMBEDDINGS_TXT = """\
good 1.0 0.2 0.0 0.0
honorable 0.9 0.3 0.1 0.0
sound 0.8 0.4 0.0 0.1
upright 0.1 0.9 0.2 0.0
large 0.7 0.0 0.2 0.5
big 0.6 0.1 0.2 0.5
great 0.8 0.1 0.1 0.2
huge 0.5 0.2 0.1 0.6
movie 0.0 0.0 1.0 0.3
film 0.0 0.1 0.9 0.4
plot 0.0 0.0 0.8 0.6
story 0.0 0.0 0.7 0.7
well 0.4 0.4 0.2 0.1
nicely 0.3 0.5 0.2 0.1
soundly 0.2 0.6 0.3 0.1
terrible 0.1 0.7 0.2 0.2
new 0.3 0.3 0.3 0.3
york 0.2 0.4 0.4 0.2
empire 0.25 0.35 0.35 0.25
state 0.3 0.2 0.4 0.3
apple 0.1 0.1 0.5 0.5
machine 0.5 0.1 0.6 0.1
learning 0.4 0.2 0.7 0.1
data 0.45 0.15 0.55 0.2
mining 0.35 0.25 0.65 0.15
primary 0.2 0.5 0.3 0.4
school 0.1 0.6 0.2 0.5
elementary 0.15 0.55 0.25 0.45
the 0.1 0.1 0.1 0.1
in 0.1 0.1 0.1 0.2
was 0.2 0.1 0.1 0.1
"""

# Binary sentiment weights (class 0 = negative, class 1 = positive). The
# softmax argmax equals the raw-score argmax, so flips below reduce to score
# comparisons that are easy to verify by hand.
SENTIMENT_WEIGHTS = {
    "good": [0.0, 2.0],
    "honorable": [0.0, 1.5],
    "sound": [0.5, 0.0],
    "upright": [1.5, 0.0],
    "large": [0.0, 1.0],
    "big": [0.4, 0.0],
    "great": [0.0, 3.0],
    "huge": [1.0, 0.0],
    "film": [0.0, 0.3],
    "movie": [0.2, 0.0],
    "plot": [0.1, 0.0],
    "story": [0.0, 0.1],
    "bad": [2.0, 0.0],
    "terrible": [3.0, 0.0],
    "nicely": [0.0, 0.5],
    "soundly": [0.7, 0.0],
    "well": [0.0, 0.8],
    "machine": [0.0, 1.0],
    "learning": [0.0, 1.2],
    "data": [2.0, 0.0],
    "mining": [1.5, 0.0],
}

# Ten documents tuned to the sentiment model above (method "u-spo"):
#   d01..d06 flip (words replaced: 1, 1, 1, 1, 2, 2)
#   d07, d08 have no attack units and fail
#   d09, d10 are misclassified when clean and are skipped
# giving ASR 6/8 and AWR 8/6 exactly.
TEN_DOC_DATASET = [
    {"id": "d01", "text": "good movie", "label": 1},
    {"id": "d02", "text": "good film", "label": 1},
    {"id": "d03", "text": "large movie", "label": 1},
    {"id": "d04", "text": "well done story", "label": 1},
    {"id": "d05", "text": "well well", "label": 1},
    {"id": "d06", "text": "good good plot", "label": 1},
    {"id": "d07", "text": "terrible movie", "label": 0},
    {"id": "d08", "text": "great story", "label": 1},
    {"id": "d09", "text": "sound plot", "label": 1},
    {"id": "d10", "text": "movie", "label": 1},
]

# What u-spo does to each attacked fixture document (verified by hand from
# SENTIMENT_WEIGHTS): id -> (success, adversarial text, words replaced).
TEN_DOC_EXPECTED = {
    "d01": (True, "sound movie", 1),
    "d02": (True, "sound film", 1),
    "d03": (True, "big movie", 1),
    "d04": (True, "soundly done story", 1),
    "d05": (True, "soundly soundly", 2),
    "d06": (True, "sound sound plot", 2),
    "d07": (False, None, 0),
    "d08": (False, None, 0),
}


def make_sentiment_model(**kwargs) -> LinearTextModel:
    return LinearTextModel(biases=[0.0, 0.0], weights=SENTIMENT_WEIGHTS, **kwargs)


def write_jsonl(path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


class FakeResponse:
    """Stand-in for a requests.Response with a scripted body."""

    def __init__(self, status_code=200, body=None, raw_text=""):
        self.status_code = status_code
        self._body = body
        self._raw_text = raw_text

    def json(self):
        if self._body is None:
            raise ValueError(f"not JSON: {self._raw_text!r}")
        return self._body


class FakeSession:
    """Stand-in for requests.Session answering from a script.

    The script maps (METHOD, path) to a list of responses consumed in order;
    the last entry repeats. An entry may be an exception instance, which is
    raised instead of returned.
    """

    def __init__(self, script):
        self.script = {key: list(entries) for key, entries in script.items()}
        self.calls = []

    def request(self, method, url, json=None, timeout=None):
        path = "/" + url.split("/", 3)[3] if url.count("/") >= 3 else url
        self.calls.append((method, path, json))
        entries = self.script.get((method, path))
        if entries is None:
            raise AssertionError(f"unscripted request: {method} {path}")
        entry = entries.pop(0) if len(entries) > 1 else entries[0]
        if isinstance(entry, Exception):
            raise entry
        return entry
