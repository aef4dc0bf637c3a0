"""Tokenization shared by every model this service hosts.

The rule matches the wire-protocol convention attack clients use: split on
whitespace, then peel leading/trailing punctuation into single-character
tokens. Interior punctuation (don't, u.s) stays attached. Model vocabularies
match on lowercased tokens.
"""

from __future__ import annotations

import string

_PUNCT = frozenset(string.punctuation)


def tokenize(text: str) -> list[str]:
    """Whitespace split with boundary punctuation peeled into its own tokens."""
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


def norm_tokens(text: str) -> list[str]:
    """Lowercased tokens, the form vocabularies are keyed by."""
    return [t.lower() for t in tokenize(text)]
