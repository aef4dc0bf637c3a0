"""Evaluation harness: attack a dataset, aggregate metrics, export examples.

Metrics follow the attacked-population convention: success rate over the
documents the attack actually ran on (clean-correct, no classifier errors),
replacement and semantic means over the successes only. Reports are fully
deterministic for a given dataset, model, method, and seed; they carry no
timestamps, so identical invocations serialize byte-identically.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from buspo.core import AttackConfig, Document, argmax_label, detokenize, read_dataset
from buspo.lexicon import Resources
from buspo.search import AttackOutcome, run_attack
from buspo.victim import VictimError

SKIPPED = "skipped"
SUCCESS = "success"
FAILURE = "failure"
ERROR = "error"


@dataclass
class DocumentRecord:
    """Per-document result inside a run report."""

    id: str
    status: str
    gold_label: int
    original_text: str
    predicted_label: int | None = None
    adversarial_text: str | None = None
    words_replaced: int | None = None
    use_score: float | None = None
    queries: int | None = None
    generations_used: int | None = None
    replacements: list | None = None
    note: str | None = None


@dataclass
class RunReport:
    """Aggregate results of one method over one dataset."""

    method: str
    model_id: str
    n_total: int
    n_correct: int
    n_success: int
    asr: float
    awr: float | None
    mean_use: float | None
    mean_queries: float | None
    total_queries: int
    records: list[DocumentRecord]


def _replacement_list(doc: Document, outcome: AttackOutcome) -> list:
    reps = []
    for start, end, substitute in outcome.replaced_units:
        original = " ".join(doc.tokens[i].norm for i in range(start, end))
        reps.append({"span": [start, end], "original": original, "substitute": substitute})
    return reps


def _attack_record(doc: Document, outcome: AttackOutcome) -> DocumentRecord:
    return DocumentRecord(
        id=doc.id,
        status=SUCCESS if outcome.success else FAILURE,
        gold_label=doc.gold_label,
        original_text=detokenize(doc),
        predicted_label=outcome.predicted_label,
        adversarial_text=(
            detokenize(outcome.adversarial) if outcome.adversarial is not None else None
        ),
        words_replaced=outcome.words_replaced,
        use_score=outcome.use_score,
        queries=outcome.queries,
        generations_used=outcome.generations_used,
        replacements=_replacement_list(doc, outcome),
    )


def run_suite(
    dataset,
    handle,
    resources: Resources,
    config: AttackConfig,
    *,
    encoder=None,
    seed: int = 0,
    limit: int | None = None,
    jobs: int = 1,
    model_id: str = "",
) -> RunReport:
    """Attack every document of a dataset with one method.

    `dataset` is a JSONL path or a list of {"id", "text", "label"} records.
    Documents are scanned in dataset order; clean-misclassified ones are
    skipped, and with a limit the scan stops once that many attacks have
    been queued. Attacks run on a bounded worker pool (jobs=1 means
    sequential); per-document classifier failures become "error" records and
    leave every aggregate.
    """
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    raw = read_dataset(dataset) if isinstance(dataset, (str, bytes)) or hasattr(dataset, "__fspath__") else list(dataset)
    scope = handle.scope()

    records: list[DocumentRecord] = []
    pending: list[tuple[Document, object]] = []  # (doc, clean_dist)
    n_total = 0
    for rec in raw:
        if limit is not None and len(pending) >= limit:
            break
        n_total += 1
        try:
            doc = resources.document(rec["id"], rec["text"], rec["label"])
            if doc.gold_label >= handle.num_labels:
                raise ValueError(
                    f"gold label {doc.gold_label} out of range for "
                    f"{handle.num_labels} classes"
                )
        except (ValueError, VictimError) as exc:
            records.append(
                DocumentRecord(
                    id=rec["id"],
                    status=ERROR,
                    gold_label=rec["label"],
                    original_text=rec["text"],
                    note=str(exc),
                )
            )
            continue
        try:
            clean_dist = scope.classify_documents([doc])[0]
        except VictimError as exc:
            records.append(
                DocumentRecord(
                    id=doc.id,
                    status=ERROR,
                    gold_label=doc.gold_label,
                    original_text=detokenize(doc),
                    note=f"clean classification failed: {exc}",
                )
            )
            continue
        predicted = argmax_label(clean_dist)
        if predicted != doc.gold_label:
            records.append(
                DocumentRecord(
                    id=doc.id,
                    status=SKIPPED,
                    gold_label=doc.gold_label,
                    original_text=detokenize(doc),
                    predicted_label=predicted,
                    queries=1,
                    note="clean prediction is already wrong",
                )
            )
            continue
        if config.targeted and config.target_label == doc.gold_label:
            records.append(
                DocumentRecord(
                    id=doc.id,
                    status=SKIPPED,
                    gold_label=doc.gold_label,
                    original_text=detokenize(doc),
                    predicted_label=predicted,
                    queries=1,
                    note="gold label equals the target label",
                )
            )
            continue
        pending.append((doc, clean_dist))

    def attack(item) -> DocumentRecord:
        doc, clean_dist = item
        try:
            outcome = run_attack(
                doc,
                scope,
                resources,
                config,
                encoder=encoder,
                seed=seed,
                clean_dist=clean_dist,
            )
        except VictimError as exc:
            return DocumentRecord(
                id=doc.id,
                status=ERROR,
                gold_label=doc.gold_label,
                original_text=detokenize(doc),
                note=f"attack aborted: {exc}",
            )
        return _attack_record(doc, outcome)

    if jobs == 1 or len(pending) <= 1:
        attacked = [attack(item) for item in pending]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            attacked = list(pool.map(attack, pending))
    records.extend(attacked)
    records.sort(key=lambda r: r.id)

    completed = [r for r in attacked if r.status in (SUCCESS, FAILURE)]
    successes = [r for r in completed if r.status == SUCCESS]
    n_correct = len(completed)
    n_success = len(successes)
    asr = (n_success / n_correct) if n_correct else 0.0
    awr = (
        sum(r.words_replaced for r in successes) / n_success if n_success else None
    )
    with_use = [r.use_score for r in successes if r.use_score is not None]
    mean_use = sum(with_use) / len(with_use) if with_use else None
    mean_queries = (
        sum(r.queries for r in completed) / n_correct if n_correct else None
    )
    return RunReport(
        method=config.method,
        model_id=model_id,
        n_total=n_total,
        n_correct=n_correct,
        n_success=n_success,
        asr=asr,
        awr=awr,
        mean_use=mean_use,
        mean_queries=mean_queries,
        total_queries=scope.query_counter,
        records=records,
    )


def _record_dict(record: DocumentRecord) -> dict:
    return {
        "id": record.id,
        "status": record.status,
        "gold_label": record.gold_label,
        "predicted_label": record.predicted_label,
        "original_text": record.original_text,
        "adversarial_text": record.adversarial_text,
        "words_replaced": record.words_replaced,
        "use_score": record.use_score,
        "queries": record.queries,
        "generations_used": record.generations_used,
        "replacements": record.replacements,
        "note": record.note,
    }


def report_to_dict(report: RunReport) -> dict:
    return {
        "method": report.method,
        "model_id": report.model_id,
        "n_total": report.n_total,
        "n_correct": report.n_correct,
        "n_success": report.n_success,
        "asr": report.asr,
        "awr": report.awr,
        "mean_use": report.mean_use,
        "mean_queries": report.mean_queries,
        "total_queries": report.total_queries,
        "records": [_record_dict(r) for r in report.records],
    }


def report_to_json(report: RunReport) -> str:
    """Deterministic JSON: sorted keys, no timestamps, trailing newline."""
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def export_adversarial(report: RunReport, path) -> int:
    """Write one JSONL record per attacked document; returns the line count.

    Skipped and errored documents are left out, so the headline metrics can
    be recomputed from the export alone.
    """
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in report.records:
            if record.status not in (SUCCESS, FAILURE):
                continue
            line = {
                "id": record.id,
                "original_text": record.original_text,
                "adversarial_text": record.adversarial_text,
                "gold_label": record.gold_label,
                "predicted_label": record.predicted_label,
                "success": record.status == SUCCESS,
                "words_replaced": record.words_replaced,
                "use_score": record.use_score,
                "queries": record.queries,
                "replacements": record.replacements,
            }
            fh.write(json.dumps(line, sort_keys=True) + "\n")
            n += 1
    return n


def render_table(report: RunReport) -> str:
    """Small aligned table of the headline numbers."""

    def fmt(value) -> str:
        if value is None:
            return "-"
        if isinstance(value, float):
            return f"{value:.4f}"
        return str(value)

    columns = [
        ("method", report.method),
        ("model", report.model_id or "-"),
        ("total", report.n_total),
        ("attacked", report.n_correct),
        ("successes", report.n_success),
        ("asr", report.asr),
        ("awr", report.awr),
        ("mean_use", report.mean_use),
        ("mean_queries", report.mean_queries),
    ]
    headers = [name for name, _v in columns]
    values = [fmt(v) for _n, v in columns]
    widths = [max(len(h), len(v)) for h, v in zip(headers, values)]
    head = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    body = "  ".join(v.ljust(w) for v, w in zip(values, widths))
    return f"{head}\n{body}\n"
