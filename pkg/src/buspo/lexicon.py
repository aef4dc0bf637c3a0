"""Substitution resources: synonyms, sememe overlaps, named entities, POS tags.

All four tables load from small TSV files (UTF-8, lowercase entries, `#`
comments, underscores joining multi-word phrases) and answer pure lookups;
nothing here talks to a classifier. A Resources bundle also builds annotated
documents, since POS tagging and entity recognition live in these tables.
"""

from __future__ import annotations

from dataclasses import dataclass

from buspo.core import (
    ADJ,
    ADV,
    NOUN,
    OTHER,
    POS_TAGS,
    VERB,
    Document,
    FormatError,
    Token,
    tokenize,
)

_ENTRY_POS = frozenset({NOUN, VERB, ADJ, ADV, "*"})


def _data_lines(path):
    """Yield (line_no, stripped line) skipping blanks and `#` comments."""
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield line_no, line


def _phrase(field: str) -> str:
    # Multi-word phrases are stored with underscores; we work with spaces.
    return field.strip().lower().replace("_", " ")


class SynonymSpace:
    """Synonym candidates keyed by (phrase, POS); `*` entries match any POS."""

    def __init__(self, entries: dict[tuple[str, str], set[str]]):
        self._entries = {key: tuple(sorted(cands)) for key, cands in entries.items()}
        by_phrase: dict[str, set[str]] = {}
        for (phrase, _pos), cands in entries.items():
            by_phrase.setdefault(phrase, set()).update(cands)
        self._by_phrase = {p: tuple(sorted(c)) for p, c in by_phrase.items()}

    def __len__(self) -> int:
        return len(self._entries)

    @classmethod
    def from_file(cls, path) -> "SynonymSpace":
        entries: dict[tuple[str, str], set[str]] = {}
        for line_no, line in _data_lines(path):
            fields = line.split("\t")
            if len(fields) != 3:
                raise FormatError(path, line_no, f"expected 3 columns, got {len(fields)}")
            phrase = _phrase(fields[0])
            pos = fields[1].strip()
            pos = pos if pos == "*" else pos.upper()
            if not phrase:
                raise FormatError(path, line_no, "empty phrase")
            if pos not in _ENTRY_POS:
                raise FormatError(path, line_no, f"bad POS tag {fields[1]!r}")
            cands = set()
            for cand in fields[2].split("|"):
                cand = _phrase(cand)
                if not cand:
                    raise FormatError(path, line_no, "empty candidate")
                if cand != phrase:  # a phrase is never its own candidate
                    cands.add(cand)
            entries.setdefault((phrase, pos), set()).update(cands)
        return cls(entries)

    def lookup(self, phrase: str, pos: str) -> tuple[str, ...]:
        """Candidates for a phrase under a POS tag, `*` entries included."""
        exact = self._entries.get((phrase, pos), ())
        wild = self._entries.get((phrase, "*"), ())
        if not wild:
            return exact
        if not exact:
            return wild
        return tuple(sorted(set(exact) | set(wild)))

    def lookup_any(self, phrase: str) -> tuple[str, ...]:
        """Candidates for a phrase regardless of POS (bigram substitution)."""
        return self._by_phrase.get(phrase, ())


class SememeSpace:
    """Word -> sememe tags, with the reverse index for overlap queries."""

    def __init__(self, tags: dict[str, set[str]]):
        self._tags = {w: frozenset(t) for w, t in tags.items()}
        by_tag: dict[str, set[str]] = {}
        for word, word_tags in tags.items():
            for tag in word_tags:
                by_tag.setdefault(tag, set()).add(word)
        self._by_tag = by_tag

    def __len__(self) -> int:
        return len(self._tags)

    @classmethod
    def from_file(cls, path) -> "SememeSpace":
        tags: dict[str, set[str]] = {}
        for line_no, line in _data_lines(path):
            fields = line.split("\t")
            if len(fields) != 2:
                raise FormatError(path, line_no, f"expected 2 columns, got {len(fields)}")
            word = _phrase(fields[0])
            if not word:
                raise FormatError(path, line_no, "empty word")
            word_tags = set()
            for tag in fields[1].split("|"):
                tag = tag.strip().lower()
                if not tag:
                    raise FormatError(path, line_no, "empty sememe tag")
                word_tags.add(tag)
            tags.setdefault(word, set()).update(word_tags)
        return cls(tags)

    def tags(self, word: str) -> frozenset[str]:
        return self._tags.get(word, frozenset())

    def neighbours(self, word: str) -> tuple[str, ...]:
        """Words sharing at least one sememe tag with `word`, excluding it."""
        shared: set[str] = set()
        for tag in self._tags.get(word, ()):
            shared.update(self._by_tag.get(tag, ()))
        shared.discard(word)
        return tuple(sorted(shared))


class NeTable:
    """Named-entity surfaces with per-class frequency counts."""

    def __init__(self, counts: dict[tuple[str, str], dict[int, int]]):
        self._counts = counts
        # One entity type per surface for recognition; when a surface carries
        # several types, the larger total count wins, ties to the smaller name.
        best: dict[str, tuple[int, str]] = {}
        for (surface, ne_type), per_class in counts.items():
            total = sum(per_class.values())
            key = (-total, ne_type)
            if surface not in best or key < best[surface]:
                best[surface] = key
        self._surface_type = {s: ne_type for s, (_neg, ne_type) in best.items()}
        self._max_len = max((s.count(" ") + 1 for s in self._surface_type), default=0)

    def __len__(self) -> int:
        return len(self._counts)

    @classmethod
    def from_file(cls, path) -> "NeTable":
        counts: dict[tuple[str, str], dict[int, int]] = {}
        for line_no, line in _data_lines(path):
            fields = line.split("\t")
            if len(fields) != 4:
                raise FormatError(path, line_no, f"expected 4 columns, got {len(fields)}")
            surface = _phrase(fields[0])
            ne_type = fields[1].strip().upper()
            if not surface or not ne_type:
                raise FormatError(path, line_no, "empty surface or entity type")
            try:
                class_id = int(fields[2])
                count = int(fields[3])
            except ValueError:
                raise FormatError(path, line_no, "class id and count must be integers") from None
            if class_id < 0 or count < 0:
                raise FormatError(path, line_no, "class id and count must be >= 0")
            per_class = counts.setdefault((surface, ne_type), {})
            if class_id in per_class:
                raise FormatError(
                    path, line_no, f"duplicate entry for {surface!r}/{ne_type}/{class_id}"
                )
            per_class[class_id] = count
        return cls(counts)

    def recognise(self, norms: tuple[str, ...]) -> list[tuple[int, int, str]]:
        """Greedy longest-match entity spans as (start, end, type) triples."""
        spans = []
        i = 0
        n = len(norms)
        while i < n:
            matched = False
            for length in range(min(self._max_len, n - i), 0, -1):
                phrase = " ".join(norms[i : i + length])
                ne_type = self._surface_type.get(phrase)
                if ne_type is not None:
                    spans.append((i, i + length, ne_type))
                    i += length
                    matched = True
                    break
            if not matched:
                i += 1
        return spans

    def comp_candidate(self, ne_type: str, gold_label: int) -> str | None:
        """Most frequent same-type surface outside the gold class; None if empty."""
        best_surface = None
        best_count = 0
        for (surface, s_type), per_class in sorted(self._counts.items()):
            if s_type != ne_type:
                continue
            total = sum(c for cls_id, c in per_class.items() if cls_id != gold_label)
            if total > best_count:
                best_surface, best_count = surface, total
        return best_surface

    def target_candidate(self, ne_type: str, target_label: int) -> str | None:
        """Most frequent same-type surface inside the target class; None if empty."""
        best_surface = None
        best_count = 0
        for (surface, s_type), per_class in sorted(self._counts.items()):
            if s_type != ne_type:
                continue
            total = per_class.get(target_label, 0)
            if total > best_count:
                best_surface, best_count = surface, total
        return best_surface


class PosLexicon:
    """Word -> coarse POS tag, with suffix fallbacks for unlisted words."""

    SUFFIX_RULES = (("ly", ADV), ("ing", VERB), ("ed", VERB), ("ness", NOUN), ("tion", NOUN))

    def __init__(self, table: dict[str, str]):
        self._table = table

    def __len__(self) -> int:
        return len(self._table)

    @classmethod
    def from_file(cls, path) -> "PosLexicon":
        table: dict[str, str] = {}
        for line_no, line in _data_lines(path):
            fields = line.split("\t")
            if len(fields) != 2:
                raise FormatError(path, line_no, f"expected 2 columns, got {len(fields)}")
            word = _phrase(fields[0])
            pos = fields[1].strip().upper()
            if not word:
                raise FormatError(path, line_no, "empty word")
            if pos not in POS_TAGS:
                raise FormatError(path, line_no, f"bad POS tag {fields[1]!r}")
            if word in table and table[word] != pos:
                raise FormatError(path, line_no, f"conflicting POS for {word!r}")
            table[word] = pos
        return cls(table)

    def tag(self, word: str) -> str:
        pos = self._table.get(word)
        if pos is not None:
            return pos
        for suffix, suffix_pos in self.SUFFIX_RULES:
            if len(word) > len(suffix) and word.endswith(suffix):
                return suffix_pos
        return OTHER


@dataclass(frozen=True)
class Resources:
    """The substitution resources an attack needs, loaded once."""

    synonyms: SynonymSpace
    sememes: SememeSpace
    ne_table: NeTable
    pos: PosLexicon

    def document(self, doc_id: str, text: str, label: int) -> Document:
        """Tokenize and annotate text into a Document (POS tags, entity spans)."""
        surfaces = tokenize(text)
        if not surfaces:
            raise ValueError(f"document {doc_id!r} has no tokens")
        norms = tuple(s.lower() for s in surfaces)
        pos_tags = []
        for surface, norm in zip(surfaces, norms):
            if all(not c.isalnum() for c in surface):
                pos_tags.append(OTHER)
            else:
                pos_tags.append(self.pos.tag(norm))
        ne_types: list[str | None] = [None] * len(surfaces)
        for start, end, ne_type in self.ne_table.recognise(norms):
            for i in range(start, end):
                ne_types[i] = ne_type
        tokens = tuple(
            Token(surface=s, norm=n, pos=p, ne_type=t)
            for s, n, p, t in zip(surfaces, norms, pos_tags, ne_types)
        )
        return Document(id=doc_id, tokens=tokens, gold_label=label)

    def bigram_candidates(self, first: Token, second: Token) -> tuple[str, ...]:
        """Substitutes for the two-token phrase; pure lookup, no POS filter."""
        return self.synonyms.lookup_any(f"{first.norm} {second.norm}")

    def unigram_candidates(
        self,
        token: Token,
        gold_label: int,
        *,
        include_sememes: bool = False,
        target_label: int | None = None,
    ) -> tuple[str, ...]:
        """Single-word substitutes for one token.

        Synonym (and, when enabled, sememe-overlap) candidates must carry the
        token's own POS tag; a named-entity token additionally offers the
        dominant same-type entity from outside the gold class (or from the
        target class, in targeted mode), which skips the POS filter.
        """
        cands: set[str] = set()
        for cand in self.synonyms.lookup(token.norm, token.pos):
            if " " not in cand and self.pos.tag(cand) == token.pos:
                cands.add(cand)
        if include_sememes:
            for cand in self.sememes.neighbours(token.norm):
                if " " not in cand and self.pos.tag(cand) == token.pos:
                    cands.add(cand)
        if token.ne_type is not None:
            if target_label is None:
                entity = self.ne_table.comp_candidate(token.ne_type, gold_label)
            else:
                entity = self.ne_table.target_candidate(token.ne_type, target_label)
            if entity is not None:
                cands.add(entity)
        cands.discard(token.norm)
        return tuple(sorted(cands))


def _empty(cls):
    return cls({})


def load_resources(
    synonyms_path=None, sememes_path=None, ne_path=None, pos_path=None
) -> Resources:
    """Load whichever resource files are given; missing ones load empty."""
    return Resources(
        synonyms=SynonymSpace.from_file(synonyms_path) if synonyms_path else _empty(SynonymSpace),
        sememes=SememeSpace.from_file(sememes_path) if sememes_path else _empty(SememeSpace),
        ne_table=NeTable.from_file(ne_path) if ne_path else _empty(NeTable),
        pos=PosLexicon.from_file(pos_path) if pos_path else _empty(PosLexicon),
    )
