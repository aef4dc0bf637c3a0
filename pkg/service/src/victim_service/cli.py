"""Command-line interface: make-data, train, serve.

Usage errors exit 1; runtime failures (unreadable files, bad datasets,
broken model files) exit 2. `train` reads defaults from an optional JSON
config file ({"architecture", "seed", "epochs", "full_size",
"label_names"}); explicit flags win over the config, which wins over the
built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys

from victim_service.data import generate_world


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; keep usage errors at 1
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="victim-service", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_data = sub.add_parser("make-data", help="generate the synthetic sentiment world")
    p_data.add_argument("--out", required=True, help="output directory")
    p_data.add_argument("--seed", type=int, default=7)
    p_data.add_argument("--train-size", type=int, default=2000)
    p_data.add_argument("--test-size", type=int, default=400)

    p_train = sub.add_parser("train", help="train a classifier on a JSONL dataset")
    p_train.add_argument("--dataset", required=True, help="training JSONL ({id,text,label})")
    p_train.add_argument("--out", required=True, help="where to save the trained model")
    p_train.add_argument("--test", help="held-out JSONL for the reported accuracy")
    p_train.add_argument("--config", help="JSON config with architecture/seed/epochs")
    p_train.add_argument("--architecture", choices=["word-cnn", "lstm", "bilstm"])
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--epochs", type=int)
    p_train.add_argument("--full-size", action="store_true", default=None,
                         help="research-scale layer sizes instead of desk-scale")
    p_train.add_argument("--label-names", help="comma-separated label names")

    p_serve = sub.add_parser("serve", help="serve a model over the wire protocol")
    p_serve.add_argument("--model", help="trained model file (from `train`)")
    p_serve.add_argument("--linear", help="linear bag-of-words model JSON")
    p_serve.add_argument("--embeddings", help="static embedding table backing /encode")
    p_serve.add_argument("--encoder-backend", choices=["static"], default="static",
                         help="sentence encoder behind /encode (this build ships `static`)")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


_CONFIG_KEYS = {"architecture", "seed", "epochs", "full_size", "label_names"}
_TRAIN_DEFAULTS = {
    "architecture": "word-cnn",
    "seed": 0,
    "epochs": 4,
    "full_size": False,
    "label_names": None,
}


def _load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            blob = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(blob, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    unknown = sorted(set(blob) - _CONFIG_KEYS)
    if unknown:
        raise ValueError(f"{path}: unknown config keys {unknown}; allowed: {sorted(_CONFIG_KEYS)}")
    if "label_names" in blob and blob["label_names"] is not None:
        names = blob["label_names"]
        if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
            raise ValueError(f"{path}: label_names must be a list of strings")
    for key in ("seed", "epochs"):
        if key in blob and not isinstance(blob[key], int):
            raise ValueError(f"{path}: {key} must be an integer")
    if "full_size" in blob and not isinstance(blob["full_size"], bool):
        raise ValueError(f"{path}: full_size must be a boolean")
    return blob


def _train_settings(args) -> dict:
    """Merge precedence: explicit flag > config file > default."""
    settings = dict(_TRAIN_DEFAULTS)
    if args.config:
        settings.update(_load_config(args.config))
    flags = {
        "architecture": args.architecture,
        "seed": args.seed,
        "epochs": args.epochs,
        "full_size": args.full_size,
        "label_names": args.label_names.split(",") if args.label_names else None,
    }
    for key, value in flags.items():
        if value is not None:
            settings[key] = value
    return settings


def _cmd_make_data(args) -> int:
    manifest = generate_world(
        args.out, seed=args.seed, train_size=args.train_size, test_size=args.test_size
    )
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


def _cmd_train(args) -> int:
    from victim_service.models import train_from_files

    settings = _train_settings(args)
    classifier, metrics = train_from_files(
        args.dataset,
        architecture=settings["architecture"],
        seed=settings["seed"],
        epochs=settings["epochs"],
        full_size=settings["full_size"],
        label_names=settings["label_names"],
        test_path=args.test,
    )
    classifier.save(args.out)
    metrics["model_path"] = args.out
    print(json.dumps(metrics, indent=2, sort_keys=True))
    return 0


def serving_app(args):
    """Build the FastAPI app a `serve` invocation would run."""
    from victim_service.embeddings import EmbeddingTable
    from victim_service.linear import LinearJsonModel
    from victim_service.server import build_app

    if bool(args.model) == bool(args.linear):
        raise UsageError("serve needs exactly one of --model or --linear")
    if args.linear:
        classifier = LinearJsonModel.from_json(args.linear)
    else:
        from victim_service.models import TorchTextClassifier

        classifier = TorchTextClassifier.load(args.model)
    encoder = EmbeddingTable.from_file(args.embeddings) if args.embeddings else None
    return build_app(classifier=classifier, encoder=encoder)


def _cmd_serve(args) -> int:
    import uvicorn

    app = serving_app(args)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "make-data":
            return _cmd_make_data(args)
        if args.command == "train":
            return _cmd_train(args)
        return _cmd_serve(args)
    except UsageError as exc:
        print(f"victim-service: usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"victim-service: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
