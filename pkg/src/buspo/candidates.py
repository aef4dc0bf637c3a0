"""Attack units: where a document can be attacked and with what.

A unit is a 1- or 2-token span plus its candidate substitutes. Building the
plan is pure lexicon work (no classifier queries); scoring a unit's
candidates costs exactly one batched classifier call. Best substitutes are
always estimated against the original document and never revised during the
search.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from buspo.core import (
    BIGRAM_METHODS,
    SEMEME_METHODS,
    STOPWORDS,
    AttackConfig,
    Document,
    LabelDistribution,
    Token,
    substitute_spans,
)
from buspo.lexicon import Resources

UNIGRAM = "unigram"
BIGRAM = "bigram"


@dataclass(frozen=True)
class AttackUnit:
    """One attackable span with its substitution candidates.

    `best` and `delta_p_star` stay None until the unit is scored against a
    classifier (or randomised, which sets only `best`).
    """

    start: int
    end: int  # exclusive
    kind: str
    candidates: tuple[str, ...]
    best: str | None = None
    delta_p_star: float | None = None

    def __post_init__(self):
        length = self.end - self.start
        if length not in (1, 2):
            raise ValueError(f"unit span must cover 1 or 2 tokens, got {length}")
        if self.kind not in (UNIGRAM, BIGRAM):
            raise ValueError(f"unknown unit kind {self.kind!r}")
        if (self.kind == BIGRAM) != (length == 2):
            raise ValueError(f"{self.kind} unit with span length {length}")
        if not self.candidates:
            raise ValueError("unit with no candidates")
        if tuple(sorted(set(self.candidates))) != self.candidates:
            raise ValueError("candidates must be sorted and unique")
        if self.best is not None and self.best not in self.candidates:
            raise ValueError(f"best substitute {self.best!r} not among candidates")

    @property
    def span_length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class UnitPlan:
    """The ordered, disjoint attack units of one document."""

    units: tuple[AttackUnit, ...]

    def __post_init__(self):
        prev_end = -1
        for unit in self.units:
            if unit.start < prev_end:
                raise ValueError("units must be disjoint and ordered by start")
            prev_end = unit.end

    def __len__(self) -> int:
        return len(self.units)

    @property
    def scored(self) -> bool:
        return all(u.best is not None for u in self.units)


def _attackable(token: Token, config: AttackConfig) -> bool:
    if token.is_punctuation:
        return False
    if config.stopword_skip and token.norm in STOPWORDS:
        return False
    return True


def build_units(doc: Document, resources: Resources, config: AttackConfig) -> UnitPlan:
    """Scan the document left to right and emit its attack units.

    For bigram-capable methods, a two-token span with bigram candidates takes
    precedence and its second token is skipped entirely; otherwise the token
    gets a unigram unit if any candidate survives the POS filter. Issues no
    classifier queries.
    """
    use_bigrams = config.method in BIGRAM_METHODS
    include_sememes = config.method in SEMEME_METHODS
    units = []
    tokens = doc.tokens
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not _attackable(token, config):
            i += 1
            continue
        if use_bigrams and i + 1 < len(tokens) and _attackable(tokens[i + 1], config):
            bigram = resources.bigram_candidates(token, tokens[i + 1])
            if bigram:
                units.append(
                    AttackUnit(start=i, end=i + 2, kind=BIGRAM, candidates=bigram)
                )
                i += 2
                continue
        unigram = resources.unigram_candidates(
            token,
            doc.gold_label,
            include_sememes=include_sememes,
            target_label=config.target_label,
        )
        if unigram:
            units.append(
                AttackUnit(start=i, end=i + 1, kind=UNIGRAM, candidates=unigram)
            )
        i += 1
    return UnitPlan(units=tuple(units))


def importance(
    clean: LabelDistribution,
    perturbed: LabelDistribution,
    gold_label: int,
    target_label: int | None,
) -> float:
    """How much one substitution helps the attack.

    Untargeted: drop in the gold-label probability. Targeted: rise in the
    target-label probability.
    """
    if target_label is None:
        return clean.probs[gold_label] - perturbed.probs[gold_label]
    return perturbed.probs[target_label] - clean.probs[target_label]


def candidate_importance(
    handle,
    doc: Document,
    unit: AttackUnit,
    candidate: str,
    config: AttackConfig,
    clean_dist: LabelDistribution | None = None,
) -> float:
    """Importance of one candidate; one query (plus one if clean_dist is omitted)."""
    if clean_dist is None:
        clean_dist = handle.classify_documents([doc])[0]
    perturbed = substitute_spans(doc, [(unit.start, unit.end, candidate)])
    dist = handle.classify_documents([perturbed])[0]
    return importance(clean_dist, dist, doc.gold_label, config.target_label)


def select_best(
    handle,
    doc: Document,
    unit: AttackUnit,
    config: AttackConfig,
    clean_dist: LabelDistribution,
) -> tuple[str, float]:
    """Best substitute for a unit and its importance.

    Scores every candidate in one batched call of |candidates| texts; equal
    importances resolve to the lexicographically smallest candidate (the
    candidate tuple is sorted, and the scan replaces only on strictly
    greater importance).
    """
    perturbed = [
        substitute_spans(doc, [(unit.start, unit.end, c)]) for c in unit.candidates
    ]
    dists = handle.classify_documents(perturbed)
    best_idx = 0
    best_imp = None
    for idx, dist in enumerate(dists):
        imp = importance(clean_dist, dist, doc.gold_label, config.target_label)
        if best_imp is None or imp > best_imp:
            best_idx = idx
            best_imp = imp
    return unit.candidates[best_idx], best_imp


def score_plan(
    handle,
    doc: Document,
    plan: UnitPlan,
    config: AttackConfig,
    clean_dist: LabelDistribution,
) -> UnitPlan:
    """Fill every unit's best substitute from the original document."""
    scored = [
        replace(unit, best=best, delta_p_star=delta)
        for unit in plan.units
        for best, delta in (select_best(handle, doc, unit, config, clean_dist),)
    ]
    return UnitPlan(units=tuple(scored))


def randomise_plan(plan: UnitPlan, rng) -> UnitPlan:
    """Pick each unit's substitute uniformly at random; no classifier queries."""
    units = [
        replace(unit, best=rng.choice(unit.candidates), delta_p_star=None)
        for unit in plan.units
    ]
    return UnitPlan(units=tuple(units))
