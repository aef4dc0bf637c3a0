"""Command-line interface: attack one text, evaluate a dataset, probe a service.

Exit codes: 0 on success, 1 on usage errors, 2 on runtime failures
(unreachable victim, malformed resources, broken preconditions).
"""

from __future__ import annotations

import argparse
import json
import sys

from buspo.core import BU_SPOF, METHODS, AttackConfig, FormatError, argmax_label
from buspo.encoder import HttpEncoder, encoder_from_spec
from buspo.harness import (
    _attack_record,
    _record_dict,
    export_adversarial,
    render_table,
    report_to_json,
    run_suite,
)
from buspo.lexicon import load_resources
from buspo.search import run_attack
from buspo.victim import HttpClassifier, VictimError, handle_from_spec


class _Parser(argparse.ArgumentParser):
    # Usage problems exit 1; argparse's default SystemExit(2) is reserved
    # for runtime failures here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_resource_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--synonyms", help="synonym table (phrase<TAB>pos<TAB>cand|...)")
    parser.add_argument("--sememes", help="sememe table (word<TAB>tag|...)")
    parser.add_argument("--ne", help="named-entity table (surface<TAB>type<TAB>class<TAB>count)")
    parser.add_argument("--pos", help="POS table (word<TAB>tag)")


def _add_attack_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--victim", required=True, help="http://HOST:PORT or builtin:linear:PATH")
    parser.add_argument("--method", choices=METHODS, default="bu-spo")
    parser.add_argument("--max-replacements", type=int, default=20, metavar="M")
    parser.add_argument("--targeted", type=int, default=None, metavar="LABEL",
                        help="drive the prediction to this label instead of just flipping it")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--skip-stopwords", action="store_true")
    parser.add_argument("--cache", action="store_true",
                        help="cache classifier responses (hits are not counted as queries)")
    parser.add_argument("--encoder", help="static:PATH or http://HOST:PORT")
    parser.add_argument("--embeddings", metavar="PATH",
                        help="shorthand for --encoder static:PATH")


def build_parser() -> _Parser:
    parser = _Parser(prog="buspo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_attack = sub.add_parser("attack", parents=[], help="attack a single text")
    _add_attack_flags(p_attack)
    _add_resource_flags(p_attack)
    group = p_attack.add_mutually_exclusive_group(required=True)
    group.add_argument("--text", help="the text to attack")
    group.add_argument("--file", help="file containing the text to attack")
    p_attack.add_argument("--label", type=int, default=None,
                          help="gold label (defaults to the clean prediction)")
    p_attack.add_argument("--id", default="cli", help="document id used in the output")

    p_eval = sub.add_parser("eval", help="attack every document of a dataset")
    _add_attack_flags(p_eval)
    _add_resource_flags(p_eval)
    p_eval.add_argument("--dataset", required=True, help="JSONL of {id, text, label}")
    p_eval.add_argument("--limit", type=int, default=None, metavar="N",
                        help="attack only the first N clean-correct documents")
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.add_argument("--out", help="write the report JSON here (default: stdout)")
    p_eval.add_argument("--export", help="write adversarial examples JSONL here")

    p_check = sub.add_parser("serve-check", help="probe a victim/encoder service")
    p_check.add_argument("--victim", help="http://HOST:PORT of a classifier service")
    p_check.add_argument("--encoder", help="http://HOST:PORT of an encoder service")
    return parser


def _resolve_encoder(args):
    if args.embeddings and args.encoder:
        raise UsageError("--embeddings and --encoder are mutually exclusive")
    if args.embeddings:
        return encoder_from_spec(f"static:{args.embeddings}")
    if args.encoder:
        return encoder_from_spec(args.encoder)
    return None


def _make_config(args) -> AttackConfig:
    return AttackConfig(
        method=args.method,
        max_replacements=args.max_replacements,
        target_label=args.targeted,
        stopword_skip=args.skip_stopwords,
    )


class UsageError(Exception):
    pass


def _cmd_attack(args) -> int:
    config = _make_config(args)
    encoder = _resolve_encoder(args)
    if config.method == BU_SPOF and encoder is None:
        raise UsageError("--method bu-spof needs --encoder or --embeddings")
    resources = load_resources(args.synonyms, args.sememes, args.ne, args.pos)
    handle = handle_from_spec(args.victim, cache=args.cache)
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = args.text
    if not text or not text.strip():
        raise UsageError("the text to attack is empty")

    probe = resources.document(args.id, text, 0)
    clean_dist = handle.classify_documents([probe])[0]
    predicted = argmax_label(clean_dist)
    label = args.label if args.label is not None else predicted
    if label >= handle.num_labels:
        raise ValueError(f"label {label} out of range for {handle.num_labels} classes")
    if predicted != label:
        raise ValueError(
            f"clean prediction is {predicted}, not {label}; the attack "
            "precondition (correct clean classification) fails"
        )
    doc = resources.document(args.id, text, label)
    outcome = run_attack(
        doc, handle, resources, config, encoder=encoder, seed=args.seed,
        clean_dist=clean_dist,
    )
    record = _record_dict(_attack_record(doc, outcome))
    print(json.dumps(record, indent=2, sort_keys=True))
    return 0


def _cmd_eval(args) -> int:
    config = _make_config(args)
    encoder = _resolve_encoder(args)
    if config.method == BU_SPOF and encoder is None:
        raise UsageError("--method bu-spof needs --encoder or --embeddings")
    resources = load_resources(args.synonyms, args.sememes, args.ne, args.pos)
    handle = handle_from_spec(args.victim, cache=args.cache)
    report = run_suite(
        args.dataset,
        handle,
        resources,
        config,
        encoder=encoder,
        seed=args.seed,
        limit=args.limit,
        jobs=args.jobs,
        model_id=args.victim,
    )
    if args.export:
        export_adversarial(report, args.export)
    payload = report_to_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
        print(render_table(report), end="")
    else:
        print(render_table(report), end="", file=sys.stderr)
        print(payload, end="")
    return 0


def _check(name: str, fn, failures: list[str]) -> None:
    try:
        fn()
    except Exception as exc:  # report every probe, keep going
        failures.append(name)
        print(f"FAIL - {name}: {exc}")
    else:
        print(f"ok - {name}")


def _cmd_serve_check(args) -> int:
    if not args.victim and not args.encoder:
        raise UsageError("serve-check needs --victim and/or --encoder")
    failures: list[str] = []
    probe_texts = ["The quick brown fox jumps over the lazy dog .", "A terse probe ."]

    if args.victim:
        state: dict = {}

        def check_info():
            state["client"] = HttpClassifier(args.victim)

        def check_single():
            rows = state["client"].classify_texts([probe_texts[0]])
            assert len(rows) == 1

        def check_batch():
            rows = state["client"].classify_texts(probe_texts)
            assert len(rows) == len(probe_texts)
            state["batch"] = rows

        def check_sums():
            for dist in state["batch"]:
                assert abs(sum(dist.probs) - 1.0) <= 1e-6

        def check_deterministic():
            again = state["client"].classify_texts(probe_texts)
            assert [d.probs for d in again] == [d.probs for d in state["batch"]], (
                "same texts produced different distributions"
            )

        _check("victim /info responds with labels", check_info, failures)
        if "client" in state:
            _check("victim /classify single text", check_single, failures)
            _check("victim /classify batch", check_batch, failures)
            if "batch" in state:
                _check("victim rows sum to 1 within 1e-6", check_sums, failures)
                _check("victim is deterministic on repeats", check_deterministic, failures)

    if args.encoder:
        enc_state: dict = {}

        def check_encode():
            enc = HttpEncoder(args.encoder)
            enc_state["enc"] = enc
            enc_state["vectors"] = enc.encode_texts(probe_texts)
            assert len(enc_state["vectors"]) == len(probe_texts)

        def check_dims():
            dims = {len(v) for v in enc_state["vectors"]}
            assert len(dims) == 1, f"inconsistent dimensions {dims}"

        def check_repeat():
            again = enc_state["enc"].encode_texts(probe_texts)
            assert again == enc_state["vectors"], "same texts encoded differently"

        _check("encoder /encode responds", check_encode, failures)
        if "vectors" in enc_state:
            _check("encoder dimensions are consistent", check_dims, failures)
            _check("encoder is deterministic on repeats", check_repeat, failures)

    if failures:
        print(f"{len(failures)} check(s) failed")
        return 2
    print("all checks passed")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "attack":
            return _cmd_attack(args)
        if args.command == "eval":
            return _cmd_eval(args)
        return _cmd_serve_check(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (VictimError, FormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
