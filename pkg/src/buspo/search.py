"""Attack search: generation evolution, first-flip and semantic-pick variants,
plus the static / random / saliency-ordered baselines.

All searches substitute into the original document only (no compounding
drift), evaluate each generation in one batched classifier call, and stop at
min(max_replacements, plan size) generations. The semantic variant does not
stop at the first flip inside a generation; it collects every flip and keeps
the one whose sentence encoding stays closest to the original.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from buspo.candidates import UnitPlan, build_units, importance, randomise_plan, score_plan
from buspo.core import (
    BU_SPOF,
    RAND,
    STATIC,
    WSA,
    AttackConfig,
    Document,
    LabelDistribution,
    argmax_label,
    detokenize,
    substitute_spans,
)
from buspo.encoder import cosine_vectors, use_score
from buspo.lexicon import Resources

# Literal token used to blank out a span when measuring word saliency.
UNKNOWN_TOKEN = "unknown"


@dataclass
class GenerationElement:
    """A combination of plan units tried as one adversarial candidate."""

    unit_indices: tuple[int, ...]
    delta_p_adv: float | None = None


@dataclass
class SearchState:
    """Where the generational search currently stands."""

    m: int = 0
    population: list[GenerationElement] = field(default_factory=list)
    best_prev: GenerationElement | None = None
    success_pool: list = field(default_factory=list)


@dataclass(frozen=True)
class AttackOutcome:
    """What one attack produced.

    On failure, the adversarial fields describe the best-scoring element
    found (diagnostics); `success` is what counts. Replaced units are
    (start, end, substitute) triples against the original document, and
    words_replaced sums the original span lengths.
    """

    success: bool
    adversarial: Document | None
    replaced_units: tuple[tuple[int, int, str], ...]
    words_replaced: int
    use_score: float | None
    queries: int
    generations_used: int
    predicted_label: int


def best_element(population: list[GenerationElement]) -> GenerationElement:
    """Highest delta-P element; ties go to the earliest in population order."""
    best = population[0]
    for element in population[1:]:
        if element.delta_p_adv > best.delta_p_adv:
            best = element
    return best


def generation_create(state: SearchState, plan: UnitPlan) -> list[GenerationElement]:
    """Population for generation state.m.

    Generation 1 is one singleton per unit in plan order. Later generations
    extend state.best_prev by each unit it does not already use, again in
    plan order, giving |plan| - m + 1 elements.
    """
    if state.m <= 1 or state.best_prev is None:
        return [GenerationElement(unit_indices=(i,)) for i in range(len(plan.units))]
    used = set(state.best_prev.unit_indices)
    return [
        GenerationElement(unit_indices=tuple(sorted(used | {i})))
        for i in range(len(plan.units))
        if i not in used
    ]


def _apply_element(
    doc: Document, plan: UnitPlan, unit_indices: tuple[int, ...]
) -> tuple[Document, tuple[tuple[int, int, str], ...]]:
    units = [plan.units[i] for i in unit_indices]
    reps = tuple((u.start, u.end, u.best) for u in units)
    return substitute_spans(doc, list(reps)), reps


def _is_success(dist: LabelDistribution, gold_label: int, target_label: int | None) -> bool:
    predicted = argmax_label(dist)
    if target_label is None:
        return predicted != gold_label
    return predicted == target_label


def _words(reps: tuple[tuple[int, int, str], ...]) -> int:
    return sum(end - start for start, end, _sub in reps)


def _failure_outcome(
    doc: Document,
    clean_dist: LabelDistribution,
    diag,
    queries: int,
    generations_used: int,
) -> AttackOutcome:
    if diag is None:
        return AttackOutcome(
            success=False,
            adversarial=None,
            replaced_units=(),
            words_replaced=0,
            use_score=None,
            queries=queries,
            generations_used=generations_used,
            predicted_label=argmax_label(clean_dist),
        )
    _delta, adv_doc, reps, dist = diag
    return AttackOutcome(
        success=False,
        adversarial=adv_doc,
        replaced_units=reps,
        words_replaced=_words(reps),
        use_score=None,
        queries=queries,
        generations_used=generations_used,
        predicted_label=argmax_label(dist),
    )


def spo_attack(
    doc: Document,
    plan: UnitPlan,
    handle,
    config: AttackConfig,
    clean_dist: LabelDistribution,
) -> AttackOutcome:
    """Generational search returning the first label flip found.

    Requires a scored plan. Reported queries cover only this loop's calls;
    run_attack layers the clean and selection queries on top.
    """
    if not plan.scored:
        raise ValueError("spo_attack needs a scored plan")
    scope = handle.scope()
    gold = doc.gold_label
    target = config.target_label
    cap = min(config.max_replacements, len(plan.units))
    state = SearchState()
    diag = None  # (delta, doc, reps, dist) of the best non-flipping element
    for m in range(1, cap + 1):
        state.m = m
        if m > 1:
            state.best_prev = best_element(state.population)
        population = generation_create(state, plan)
        applied = [_apply_element(doc, plan, el.unit_indices) for el in population]
        dists = scope.classify_documents([adv for adv, _reps in applied])
        for element, (adv_doc, reps), dist in zip(population, applied, dists):
            if _is_success(dist, gold, target):
                return AttackOutcome(
                    success=True,
                    adversarial=adv_doc,
                    replaced_units=reps,
                    words_replaced=_words(reps),
                    use_score=None,
                    queries=scope.query_counter,
                    generations_used=m,
                    predicted_label=argmax_label(dist),
                )
            element.delta_p_adv = importance(clean_dist, dist, gold, target)
            if diag is None or element.delta_p_adv > diag[0]:
                diag = (element.delta_p_adv, adv_doc, reps, dist)
        state.population = population
    return _failure_outcome(doc, clean_dist, diag, scope.query_counter, cap)


def spof_attack(
    doc: Document,
    plan: UnitPlan,
    handle,
    encoder,
    config: AttackConfig,
    clean_dist: LabelDistribution,
) -> AttackOutcome:
    """Generational search keeping the most semantics-preserving flip.

    Identical population evolution to spo_attack, but a generation's flips
    are all collected and the one with the highest use_score wins (ties to
    the earliest). Delta-P bookkeeping happens only for non-flipping
    elements, which are all the evolution ever continues from.
    """
    if not plan.scored:
        raise ValueError("spof_attack needs a scored plan")
    scope = handle.scope()
    gold = doc.gold_label
    target = config.target_label
    cap = min(config.max_replacements, len(plan.units))
    original_vec = None  # encoded lazily, only when a generation flips
    state = SearchState()
    diag = None
    for m in range(1, cap + 1):
        state.m = m
        if m > 1:
            state.best_prev = best_element(state.population)
        population = generation_create(state, plan)
        applied = [_apply_element(doc, plan, el.unit_indices) for el in population]
        dists = scope.classify_documents([adv for adv, _reps in applied])
        state.success_pool = []
        for element, (adv_doc, reps), dist in zip(population, applied, dists):
            if _is_success(dist, gold, target):
                state.success_pool.append((adv_doc, reps, dist, m))
            else:
                element.delta_p_adv = importance(clean_dist, dist, gold, target)
                if diag is None or element.delta_p_adv > diag[0]:
                    diag = (element.delta_p_adv, adv_doc, reps, dist)
        if state.success_pool:
            if original_vec is None:
                original_vec = encoder.encode_texts([detokenize(doc)])[0]
            vectors = encoder.encode_texts(
                [detokenize(adv) for adv, _reps, _dist, _m in state.success_pool]
            )
            best_idx = 0
            best_score = cosine_vectors(original_vec, vectors[0])
            for idx in range(1, len(vectors)):
                score = cosine_vectors(original_vec, vectors[idx])
                if score > best_score:
                    best_idx, best_score = idx, score
            adv_doc, reps, dist, gen = state.success_pool[best_idx]
            return AttackOutcome(
                success=True,
                adversarial=adv_doc,
                replaced_units=reps,
                words_replaced=_words(reps),
                use_score=best_score,
                queries=scope.query_counter,
                generations_used=gen,
                predicted_label=argmax_label(dist),
            )
        state.population = population
    return _failure_outcome(doc, clean_dist, diag, scope.query_counter, cap)


def _incremental_attack(
    doc: Document,
    plan: UnitPlan,
    order: list[int],
    handle,
    config: AttackConfig,
    clean_dist: LabelDistribution,
) -> AttackOutcome:
    """Try growing prefixes of a fixed unit order, one element per step."""
    scope = handle.scope()
    gold = doc.gold_label
    target = config.target_label
    cap = min(config.max_replacements, len(plan.units))
    diag = None
    for m in range(1, cap + 1):
        indices = tuple(sorted(order[:m]))
        adv_doc, reps = _apply_element(doc, plan, indices)
        dist = scope.classify_documents([adv_doc])[0]
        if _is_success(dist, gold, target):
            return AttackOutcome(
                success=True,
                adversarial=adv_doc,
                replaced_units=reps,
                words_replaced=_words(reps),
                use_score=None,
                queries=scope.query_counter,
                generations_used=m,
                predicted_label=argmax_label(dist),
            )
        delta = importance(clean_dist, dist, gold, target)
        if diag is None or delta > diag[0]:
            diag = (delta, adv_doc, reps, dist)
    return _failure_outcome(doc, clean_dist, diag, scope.query_counter, cap)


def static_attack(
    doc: Document,
    plan: UnitPlan,
    handle,
    config: AttackConfig,
    clean_dist: LabelDistribution,
) -> AttackOutcome:
    """Baseline: units in descending delta-P* order, replaced cumulatively."""
    if not plan.scored:
        raise ValueError("static_attack needs a scored plan")
    if any(u.delta_p_star is None for u in plan.units):
        raise ValueError("static_attack needs delta_p_star on every unit")
    # Stable sort: equal importances keep span order.
    order = sorted(range(len(plan.units)), key=lambda i: -plan.units[i].delta_p_star)
    return _incremental_attack(doc, plan, order, handle, config, clean_dist)


def wsa_order(
    doc: Document,
    plan: UnitPlan,
    handle,
    config: AttackConfig,
    clean_dist: LabelDistribution,
) -> list[int]:
    """Unit order by word saliency, descending; ties keep span order.

    Saliency of a unit is the attack-direction probability shift when its
    span is blanked with the literal token "unknown". Costs one batched call
    of |plan| texts.
    """
    scope = handle.scope()
    blanked = [
        substitute_spans(doc, [(u.start, u.end, UNKNOWN_TOKEN)]) for u in plan.units
    ]
    dists = scope.classify_documents(blanked)
    saliency = [
        importance(clean_dist, dist, doc.gold_label, config.target_label)
        for dist in dists
    ]
    return sorted(range(len(plan.units)), key=lambda i: -saliency[i])


def wsa_attack(
    doc: Document,
    plan: UnitPlan,
    handle,
    config: AttackConfig,
    clean_dist: LabelDistribution,
) -> AttackOutcome:
    """Baseline: saliency-ordered cumulative replacement."""
    if not plan.scored:
        raise ValueError("wsa_attack needs a scored plan")
    scope = handle.scope()
    order = wsa_order(doc, plan, scope, config, clean_dist)
    outcome = _incremental_attack(doc, plan, order, scope, config, clean_dist)
    return replace(outcome, queries=scope.query_counter)


def rand_attack(
    doc: Document,
    plan: UnitPlan,
    handle,
    config: AttackConfig,
    clean_dist: LabelDistribution,
    rng: random.Random,
) -> AttackOutcome:
    """Baseline: random substitute per unit, then the first-flip search."""
    randomised = randomise_plan(plan, rng)
    return spo_attack(doc, randomised, handle, config, clean_dist)


def rng_for_document(seed: int, doc_id: str) -> random.Random:
    # String seeding is stable across runs and platforms, unlike hash().
    return random.Random(f"{seed}:{doc_id}")


def run_attack(
    doc: Document,
    handle,
    resources: Resources,
    config: AttackConfig,
    *,
    encoder=None,
    seed: int = 0,
    clean_dist: LabelDistribution | None = None,
) -> AttackOutcome:
    """Full attack pipeline for one document.

    Classifies the clean text (1 query) unless a distribution is supplied (in
    which case that query is still charged here, since every attack needs
    it), checks the preconditions, builds and scores the plan, runs the
    configured method, and fills the semantic score when an encoder is
    available. Reported queries cover the whole pipeline.
    """
    scope = handle.scope()
    charged_upstream = 0
    if clean_dist is None:
        clean_dist = scope.classify_documents([doc])[0]
    else:
        charged_upstream = 1
    if doc.gold_label >= handle.num_labels:
        raise ValueError(
            f"document {doc.id!r}: gold label {doc.gold_label} out of range "
            f"for {handle.num_labels} classes"
        )
    if argmax_label(clean_dist) != doc.gold_label:
        raise ValueError(
            f"document {doc.id!r} is misclassified before the attack; skip it upstream"
        )
    if config.targeted:
        if config.target_label >= handle.num_labels:
            raise ValueError(f"target label {config.target_label} out of range")
        if config.target_label == doc.gold_label:
            raise ValueError("target label equals the gold label")
    if config.method == BU_SPOF and encoder is None:
        raise ValueError("the semantic-pick method needs an encoder")

    plan = build_units(doc, resources, config)
    if config.method == RAND:
        plan = randomise_plan(plan, rng_for_document(seed, doc.id))
    else:
        plan = score_plan(scope, doc, plan, config, clean_dist)

    if len(plan) == 0:
        outcome = _failure_outcome(doc, clean_dist, None, 0, 0)
    elif config.method == BU_SPOF:
        outcome = spof_attack(doc, plan, scope, encoder, config, clean_dist)
    elif config.method == STATIC:
        outcome = static_attack(doc, plan, scope, config, clean_dist)
    elif config.method == WSA:
        outcome = wsa_attack(doc, plan, scope, config, clean_dist)
    else:
        # u-spo / hu-spo / bu-spo differ only in plan construction; rand
        # differs only in substitute choice. All share the first-flip loop.
        outcome = spo_attack(doc, plan, scope, config, clean_dist)

    if outcome.use_score is None and outcome.adversarial is not None and encoder is not None:
        outcome = replace(outcome, use_score=use_score(encoder, doc, outcome.adversarial))
    return replace(outcome, queries=charged_upstream + scope.query_counter)
