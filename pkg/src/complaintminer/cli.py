"""Command-line entry point: one binary, one subcommand per pipeline stage.

Every subcommand is file-in/file-out and deterministic for a fixed
``--seed``; nothing ever rewrites its inputs.  A flat ``key=value`` config
file can pre-set any flag (key = flag name without dashes); explicit
flags win.

Exit codes: 0 success, 1 validation problem (bad flags, missing or
malformed input), 2 runtime failure.
"""

import argparse
import json
import sys
from pathlib import Path

from .annotation import load_decisions
from .bootstrap import (
    BackgroundPool,
    BootstrapConfig,
    append_report,
    initial_seeds,
    run,
    save_lexicon,
)
from .classifier import (
    ElasticNetLRModel,
    TrainConfig,
    cross_validate,
    evaluate,
    predict,
    train,
)
from .corpus import Corpus, export, ingest, is_content_token, tokenize_post
from .errors import ConfigError, InputFormatError
from .features import ALL_GROUPS, default_resources, extract_all
from .vectorspace import Vocabulary

# Table-1 row labels, in table order, keyed by feature group
GROUP_LABELS = {
    "bow": "Bag-of-Words",
    "pos": "POS Tags",
    "w2v": "Word2Vec cluster",
    "sent_mpqa": "Sentiment-MPQA",
    "sent_nrc": "Sentiment-NRC",
    "sent_vader": "Sentiment-VADER",
    "sent_stanford_proxy": "Sentiment-Stanford",
    "meta": "Text Meta-Data",
    "request": "Request Identification",
    "intensify": "Intensifiers",
    "polite": "Politeness Markers",
    "pronoun": "Pronoun Variations",
}


# -- config file ---------------------------------------------------------

def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    values: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _setting(args, config: dict[str, str], flag: str, default, cast=str):
    """Flag value if given, else config-file value, else the default."""
    explicit = getattr(args, flag.replace("-", "_"))
    if explicit is not None:
        return explicit
    key = flag.replace("-", "")
    if key in config:
        try:
            return cast(config[key])
        except ValueError as exc:
            raise ConfigError(f"config key {key!r}: {exc}")
    return default


def _require(value, flag: str):
    if value is None:
        raise ConfigError(f"--{flag} is required")
    return value


# -- shared I/O ----------------------------------------------------------

def _read_features(path: str) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                rows.append({"id": row["id"], "label": row.get("label"),
                             "features": dict(row["features"])})
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise InputFormatError(f"{path}: line {line_no}: {exc}") from exc
    if not rows:
        raise InputFormatError(f"{path}: no feature rows")
    return rows


def _labeled_matrix(rows: list[dict], groups: list[str] | None):
    X, y = [], []
    for row in rows:
        if row["label"] is None:
            raise InputFormatError(f"post {row['id']!r} has no label; featurize a labeled corpus")
        if row["label"] not in ("complaint", "non_complaint"):
            raise InputFormatError(f"post {row['id']!r}: unknown label {row['label']!r}")
        X.append(_group_slice(row["features"], groups))
        y.append(1 if row["label"] == "complaint" else 0)
    return X, y


def _group_slice(features: dict, groups: list[str] | None) -> dict:
    if groups is None:
        return features
    wanted = set(groups)
    return {k: v for k, v in features.items() if k.split(".", 1)[0] in wanted}


def _parse_groups(raw: str | None) -> list[str] | None:
    if raw is None:
        return None
    groups = [g.strip() for g in raw.split(",") if g.strip()]
    unknown = [g for g in groups if g not in ALL_GROUPS]
    if unknown:
        raise ConfigError(f"unknown feature groups: {unknown}; valid: {list(ALL_GROUPS)}")
    if not groups:
        raise ConfigError("--groups must name at least one group")
    return groups


def _write_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


# -- subcommands ---------------------------------------------------------

def cmd_ingest(args) -> int:
    config = _load_config(args.config)
    source = _require(_setting(args, config, "input", None), "input")
    target = _require(_setting(args, config, "output", None), "output")
    corpus = ingest(source)
    fmt = "csv" if str(target).endswith(".csv") else "jsonl"
    export(corpus, target, format=fmt)
    print(f"ingested {len(corpus)} posts -> {target}")
    return 0


def cmd_seed(args) -> int:
    config = _load_config(args.config)
    source = _require(_setting(args, config, "input", None), "input")
    target = _require(_setting(args, config, "output", None), "output")
    k = _setting(args, config, "k", 50, int)
    corpus = ingest(source)
    seeds = initial_seeds(corpus, k=k)
    from .bootstrap import Lexicon
    save_lexicon(Lexicon(seeds), target)
    print(f"extracted {len(seeds)} seed phrases -> {target}")
    return 0


def _interactive_review(candidates, iteration):
    decisions = {}
    for cand in candidates:
        score = "seed" if cand.drs is None else f"drs={cand.drs:.2f}"
        sys.stdout.write(f"[iter {iteration}] keep {cand.text!r} ({score})? [y/n] ")
        sys.stdout.flush()
        line = sys.stdin.readline()
        if not line:
            raise ConfigError("interactive review needs an answer per candidate; input ended early")
        decisions[cand.text] = line.strip().lower() in ("y", "yes")
    return decisions


def cmd_bootstrap(args) -> int:
    config = _load_config(args.config)
    source = _require(_setting(args, config, "input", None), "input")
    informative_path = _require(_setting(args, config, "informative", None), "informative")
    background_path = _require(_setting(args, config, "background", None), "background")
    target = _require(_setting(args, config, "output", None), "output")
    mode = _setting(args, config, "mode", "auto")
    if mode not in ("auto", "interactive"):
        raise ConfigError(f"--mode must be auto or interactive, got {mode!r}")

    boot_config = BootstrapConfig(
        seed_count=_setting(args, config, "k", 50, int),
        drs_threshold=_setting(args, config, "drs-threshold", 10.0, float),
        dedup_threshold=_setting(args, config, "dedup-threshold", 0.9, float),
        max_iterations=_setting(args, config, "max-iter", 10, int),
        review_mode=mode,
    )
    corpus = ingest(source)
    informative = ingest(informative_path)
    background = BackgroundPool(ingest(background_path))

    review = _interactive_review if mode == "interactive" else None
    result = run(corpus, informative, background, boot_config, review=review)

    save_lexicon(result.lexicon, target)
    report_path = _setting(args, config, "report", None)
    for report in result.reports:
        if report_path is not None:
            append_report(report, report_path)
        stop = f" stop={report.stop_reason.value}" if report.stop_reason else ""
        print(f"iteration {report.iteration}: {len(report.new_phrases)} new phrase(s), "
              f"{report.matched_post_count} matched post(s){stop}")
    approved = len(result.lexicon.approved())
    print(f"lexicon: {approved} approved phrase(s) -> {target}")
    return 0


def cmd_featurize(args) -> int:
    config = _load_config(args.config)
    source = _require(_setting(args, config, "input", None), "input")
    target = _require(_setting(args, config, "output", None), "output")
    groups = _parse_groups(_setting(args, config, "groups", None)) or list(ALL_GROUPS)
    seed = _setting(args, config, "seed", 0, int)
    vocab_path = _setting(args, config, "vocab", None)

    corpus = ingest(source)
    vocab = None
    if "bow" in groups:
        if vocab_path is not None and Path(vocab_path).exists():
            terms = json.loads(Path(vocab_path).read_text(encoding="utf-8"))["terms"]
            vocab = Vocabulary(terms)
        else:
            terms = {t for p in corpus for t in tokenize_post(p).tokens if is_content_token(t)}
            vocab = Vocabulary(terms)
            if vocab_path is not None:
                _write_json({"terms": sorted(terms)}, vocab_path)
    resources = default_resources(bow_vocab=vocab, cluster_seed=seed)

    with open(target, "w", encoding="utf-8") as fh:
        for post in corpus:
            vector = extract_all(tokenize_post(post), resources, groups=groups)
            label = None if post.complaint_label is None else post.complaint_label.value
            fh.write(json.dumps({"id": post.id, "label": label,
                                 "features": vector.flatten()}, sort_keys=True) + "\n")
    print(f"featurized {len(corpus)} posts ({len(groups)} group(s)) -> {target}")
    return 0


def cmd_train(args) -> int:
    config = _load_config(args.config)
    source = _require(_setting(args, config, "input", None), "input")
    target = _require(_setting(args, config, "output", None), "output")
    groups = _parse_groups(_setting(args, config, "groups", None))
    train_config = TrainConfig(
        lambda1=_setting(args, config, "lambda1", 1e-4, float),
        lambda2=_setting(args, config, "lambda2", 1e-4, float),
        rng_seed=_setting(args, config, "seed", 0, int),
    )
    X, y = _labeled_matrix(_read_features(source), groups)
    model = train(X, y, train_config)
    model.save(target)
    nonzero = sum(1 for w in model.weights if w != 0.0)
    print(f"trained on {len(y)} posts: {nonzero}/{len(model.weights)} active weights -> {target}")
    return 0


def cmd_crossval(args) -> int:
    config = _load_config(args.config)
    source = _require(_setting(args, config, "input", None), "input")
    target = _setting(args, config, "output", None)
    groups = _parse_groups(_setting(args, config, "groups", None))
    k = _setting(args, config, "k", 10, int)
    train_config = TrainConfig(
        lambda1=_setting(args, config, "lambda1", 1e-4, float),
        lambda2=_setting(args, config, "lambda2", 1e-4, float),
        rng_seed=_setting(args, config, "seed", 0, int),
    )
    X, y = _labeled_matrix(_read_features(source), groups)
    report = cross_validate(X, y, k=k, config=train_config)
    if target is not None:
        _write_json(report.to_dict(), target)
    print(f"{k}-fold accuracy {report.accuracy:.3f} precision {report.precision:.3f} "
          f"recall {report.recall:.3f} f1 {report.f1:.3f}")
    return 0


def cmd_classify(args) -> int:
    config = _load_config(args.config)
    source = _require(_setting(args, config, "input", None), "input")
    model_path = _require(_setting(args, config, "model", None), "model")
    target = _require(_setting(args, config, "output", None), "output")
    model = ElasticNetLRModel.load(model_path)
    rows = _read_features(source)
    complaints = 0
    with open(target, "w", encoding="utf-8") as fh:
        for row in rows:
            score = predict(model, row["features"])
            label = "complaint" if score >= 0.5 else "non_complaint"
            complaints += label == "complaint"
            fh.write(json.dumps({"id": row["id"], "score": score, "label": label},
                                sort_keys=True) + "\n")
    print(f"classified {len(rows)} posts ({complaints} complaints) -> {target}")
    return 0


def cmd_kappa(args) -> int:
    config = _load_config(args.config)
    source = _require(_setting(args, config, "input", None), "input")
    target = _setting(args, config, "output", None)
    decisions = load_decisions(source)
    annotators = sorted({d.annotator_id for d in decisions})
    if len(annotators) != 2:
        raise InputFormatError(
            f"{source}: agreement needs exactly 2 annotators, found {len(annotators)}")
    from .annotation import kappa as cohen_kappa
    first = {d.task_id: d.label for d in decisions if d.annotator_id == annotators[0]}
    second = {d.task_id: d.label for d in decisions if d.annotator_id == annotators[1]}
    report = cohen_kappa(first, second)
    if target is not None:
        _write_json(report.to_dict(), target)
    print(f"kappa {report.kappa:.4f} over {report.n_items} shared task(s) "
          f"(observed {report.observed_agreement:.4f}, expected {report.expected_agreement:.4f})")
    return 0


def cmd_serve(args) -> int:
    config = _load_config(args.config)
    source = _require(_setting(args, config, "input", None), "input")
    informative_path = _require(_setting(args, config, "informative", None), "informative")
    background_path = _require(_setting(args, config, "background", None), "background")
    journal = _setting(args, config, "journal", None)
    addr = _setting(args, config, "serve-addr", "127.0.0.1:8765")
    host, _, port_text = addr.partition(":")
    if not host or not port_text.isdigit():
        raise ConfigError(f"--serve-addr must look like host:port, got {addr!r}")

    from .service import create_app
    import uvicorn

    app = create_app(ingest(source), ingest(informative_path),
                     BackgroundPool(ingest(background_path)), journal_dir=journal)
    print(f"serving on http://{addr}")
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    return 0


def cmd_report(args) -> int:
    config = _load_config(args.config)
    source = _require(_setting(args, config, "input", None), "input")
    target = _setting(args, config, "output", None)
    directory = Path(source)
    if not directory.is_dir():
        raise ConfigError(f"--input must be a directory of per-group crossval files, got {source!r}")

    rows = []
    for group, label in GROUP_LABELS.items():
        path = directory / f"{group}.json"
        if not path.exists():
            continue
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            rows.append((label, float(data["accuracy"]), float(data["f1"])))
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise InputFormatError(f"{path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"{source}: no <group>.json crossval reports found")

    width = max(len("Model"), max(len(label) for label, _, _ in rows))
    lines = [f"{'Model':<{width}}  {'Accuracy(%)':>11}  {'F1-score':>8}"]
    for label, accuracy, f1 in rows:
        lines.append(f"{label:<{width}}  {accuracy * 100:>11.1f}  {f1:>8.2f}")
    table = "\n".join(lines) + "\n"
    if target is not None:
        Path(target).write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    return 0


# -- parser --------------------------------------------------------------

def _add_common(sub):
    sub.add_argument("--input")
    sub.add_argument("--output")
    sub.add_argument("--config")
    sub.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="complaintminer",
                                     description="transport-complaint mining pipeline")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("ingest", help="validate raw posts into canonical form")
    _add_common(sub)
    sub.set_defaults(func=cmd_ingest)

    sub = commands.add_parser("seed", help="extract seed phrases from an informative sample")
    _add_common(sub)
    sub.add_argument("--k", type=int, help="number of seed phrases")
    sub.set_defaults(func=cmd_seed)

    sub = commands.add_parser("bootstrap", help="run the lexicon bootstrapping loop")
    _add_common(sub)
    sub.add_argument("--informative", help="annotated informative sample")
    sub.add_argument("--background", help="out-of-domain background pool")
    sub.add_argument("--report", help="append per-iteration reports to this JSONL file")
    sub.add_argument("--mode", choices=("auto", "interactive"))
    sub.add_argument("--k", type=int, help="number of seed phrases")
    sub.add_argument("--drs-threshold", type=float)
    sub.add_argument("--dedup-threshold", type=float)
    sub.add_argument("--max-iter", type=int)
    sub.set_defaults(func=cmd_bootstrap)

    sub = commands.add_parser("featurize", help="extract feature vectors for every post")
    _add_common(sub)
    sub.add_argument("--groups", help="comma-separated feature groups (default: all)")
    sub.add_argument("--vocab", help="bag-of-words vocabulary JSON (reused if present)")
    sub.set_defaults(func=cmd_featurize)

    sub = commands.add_parser("train", help="fit the complaint classifier")
    _add_common(sub)
    sub.add_argument("--groups")
    sub.add_argument("--lambda1", type=float)
    sub.add_argument("--lambda2", type=float)
    sub.set_defaults(func=cmd_train)

    sub = commands.add_parser("crossval", help="stratified k-fold evaluation")
    _add_common(sub)
    sub.add_argument("--groups")
    sub.add_argument("--k", type=int, help="fold count")
    sub.add_argument("--lambda1", type=float)
    sub.add_argument("--lambda2", type=float)
    sub.set_defaults(func=cmd_crossval)

    sub = commands.add_parser("classify", help="score featurized posts with a trained model")
    _add_common(sub)
    sub.add_argument("--model", help="trained model JSON")
    sub.set_defaults(func=cmd_classify)

    sub = commands.add_parser("kappa", help="inter-annotator agreement from a decision file")
    _add_common(sub)
    sub.set_defaults(func=cmd_kappa)

    sub = commands.add_parser("serve", help="start the annotation/bootstrap HTTP service")
    _add_common(sub)
    sub.add_argument("--informative")
    sub.add_argument("--background")
    sub.add_argument("--journal", help="journal directory for durable state")
    sub.add_argument("--serve-addr", help="host:port (default 127.0.0.1:8765)")
    sub.set_defaults(func=cmd_serve)

    sub = commands.add_parser("report", help="per-group evaluation table")
    _add_common(sub)
    sub.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse has already printed its message; --help exits 0,
        # anything else is a validation problem
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (ConfigError, InputFormatError, FileNotFoundError, IsADirectoryError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    except Exception as exc:  # pragma: no cover - surfaced with its type for debugging
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
