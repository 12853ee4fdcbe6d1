"""Command-line surface: ingest, emb, train, eval, compare, report.

Exit codes are a stable scripting contract: 0 success, 2 data error,
3 embedding-coverage error, 64 usage error. All randomness flows from the
experiment's master seed; outputs embed the resolved configuration and
contain no wall-clock timestamps, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, corpus, embeddings, evaluation, model, training

EXIT_OK = 0
EXIT_DATA = 2
EXIT_COVERAGE = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse's default exits with code 2
        raise UsageError(message)


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as err:
        raise corpus.ParseError(f"cannot read file: {err}", path=path) from err


def _load_corpus(path: str, keep_extras: bool = True) -> list[corpus.DiscourseRelation]:
    return corpus.parse_jsonl(_read_bytes(path), keep_extras=keep_extras, path=path)


def _dump_json(obj) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _sense_by_name(name: str) -> corpus.SenseTop:
    for sense in corpus.SenseTop:
        if name == sense.value:
            return sense
    raise UsageError(f"unknown sense {name!r}; choose from "
                     + ", ".join(s.value for s in corpus.SenseTop))


# ---------------------------------------------------------------------------
# ingest


def cmd_ingest(args) -> int:
    rels: list[corpus.DiscourseRelation] = []
    if args.format == "pipe":
        if not args.column_map:
            raise UsageError("--format pipe requires --column-map")
        cmap = corpus.PipeColumnMap.from_json(_read_bytes(args.column_map))
        for path in args.inputs:
            doc_id = args.doc_id or Path(path).stem
            rels.extend(
                corpus.parse_pipe_file(
                    _read_bytes(path),
                    cmap,
                    doc_id=doc_id,
                    corpus=args.corpus or Path(path).stem,
                    lang=args.lang,
                    path=path,
                )
            )
    else:
        for path in args.inputs:
            rels.extend(_load_corpus(path, keep_extras=not args.drop_extras))
    Path(args.output).write_bytes(corpus.write_jsonl(rels))

    type_counts: dict[str, int] = {}
    for rel in rels:
        type_counts[rel.rel_type] = type_counts.get(rel.rel_type, 0) + 1
    for rel_type in corpus.KNOWN_REL_TYPES:
        print(f"{rel_type}: {type_counts.pop(rel_type, 0)}")
    for rel_type in sorted(type_counts):
        print(f"{rel_type}: {type_counts[rel_type]}")
    hist = corpus.sense_histogram(rels)
    for sense in corpus.SenseTop:
        print(f"  {sense.value}: {hist[sense]}")
    for rel_id, raw in corpus.sense_violations(rels):
        print(f"warning: relation {rel_id}: unresolvable top sense {raw!r}", file=sys.stderr)
    print(f"wrote {len(rels)} relations to {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# emb


def cmd_emb_inspect(args) -> int:
    store = embeddings.read_embedding_file(_read_bytes(args.file))
    print(f"dim: {store.dim}")
    print(f"count: {len(store)}")
    print("OK")
    return EXIT_OK


def cmd_emb_coverage(args) -> int:
    store = embeddings.read_embedding_file(_read_bytes(args.file))
    rels = corpus.select_implicit(_load_corpus(args.corpus))
    missing = embeddings.missing_keys(rels, store)
    if missing:
        for key in missing:
            print(f"missing: {key}")
        print(f"{len(missing)} of {2 * len(rels)} required keys missing")
        return EXIT_COVERAGE
    print(f"coverage OK ({2 * len(rels)} keys)")
    return EXIT_OK


def cmd_emb_import(args) -> int:
    entries: list[tuple[str, np.ndarray]] = []
    dim = None
    text = _read_bytes(args.input).decode("utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        key, _, rest = line.partition("\t")
        values = rest.split()
        if not key or not values:
            raise corpus.ParseError("expected 'key<TAB>v1 v2 ...'", path=args.input, line=line_no)
        try:
            vec = np.array([float(v) for v in values], dtype=np.float32)
        except ValueError as err:
            raise corpus.ParseError(str(err), path=args.input, line=line_no) from err
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise corpus.ParseError(
                f"vector has {len(vec)} components, expected {dim}", path=args.input, line=line_no
            )
        entries.append((key, vec))
    if dim is None:
        raise corpus.ParseError("no vectors in input", path=args.input)
    try:
        store = embeddings.EmbeddingStore(dim, entries)
    except ValueError as err:
        raise corpus.ParseError(str(err), path=args.input) from err
    if args.l2_normalize:
        store = embeddings.l2_normalized(store)
    Path(args.output).write_bytes(embeddings.write_embedding_file(store))
    print(f"dim: {store.dim}")
    print(f"count: {len(store)}")
    print(f"l2_normalized: {str(args.l2_normalize).lower()}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# train


_CONFIG_DEFAULTS = {
    "senses": [s.value for s in corpus.SenseTop],
    "runs": 100,
    "master_seed": 0,
    "epochs": 50,
    "batch_size": 64,
    "lr": 0.01,
    "dropout_p": 0.3,
    "hidden_units": 100,
    "adagrad_eps": 1e-8,
}


def _resolve_train_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            cfg = json.loads(_read_bytes(args.config))
        except json.JSONDecodeError as err:
            raise corpus.ParseError(f"invalid JSON ({err.msg})", path=args.config, line=err.lineno)
        if not isinstance(cfg, dict):
            raise corpus.ParseError("config must be a JSON object", path=args.config)
    # Flags override config fields.
    if args.train:
        cfg["train"] = [p for chunk in args.train for p in chunk.split(",") if p]
    if args.dev:
        cfg["dev"] = args.dev
    if args.test:
        tests = dict(cfg.get("test", {}))
        for item in args.test:
            name, _, path = item.partition("=")
            if not path:
                raise UsageError("--test expects name=path")
            tests[name] = path
        cfg["test"] = tests
    if args.emb:
        cfg["embeddings"] = args.emb
    if args.out:
        cfg["out_dir"] = args.out
    if args.sense:
        cfg["senses"] = args.sense
    for field in ("runs", "master_seed", "epochs", "batch_size", "lr", "dropout_p", "hidden_units"):
        value = getattr(args, field)
        if value is not None:
            cfg[field] = value
    for field, default in _CONFIG_DEFAULTS.items():
        cfg.setdefault(field, default)
    for field in ("train", "dev", "test", "embeddings", "out_dir"):
        if not cfg.get(field):
            raise UsageError(f"missing required config field {field!r}")
    for path in [*cfg["train"], cfg["dev"], *cfg["test"].values(), cfg["embeddings"]]:
        if not Path(path).exists():
            raise corpus.ParseError("referenced file does not exist", path=str(path))
    return cfg


def _config_echo(cfg: dict) -> dict:
    return {
        "train": list(cfg["train"]),
        "dev": cfg["dev"],
        "test": dict(cfg["test"]),
        "embeddings": cfg["embeddings"],
        "senses": list(cfg["senses"]),
        "runs": cfg["runs"],
        "master_seed": cfg["master_seed"],
        "epochs": cfg["epochs"],
        "batch_size": cfg["batch_size"],
        "lr": cfg["lr"],
        "dropout_p": cfg["dropout_p"],
        "hidden_units": cfg["hidden_units"],
        "adagrad_eps": cfg["adagrad_eps"],
    }


def cmd_train(args) -> int:
    cfg = _resolve_train_config(args)
    jobs = args.jobs or int(os.environ.get("DRELKIT_JOBS", "1"))
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)

    store = embeddings.read_embedding_file(_read_bytes(cfg["embeddings"]))
    train_corpora = [
        (Path(p).stem, corpus.select_implicit(_load_corpus(p))) for p in cfg["train"]
    ]
    dev_rels = corpus.select_implicit(_load_corpus(cfg["dev"]))
    test_sets = {
        name: corpus.select_implicit(_load_corpus(path)) for name, path in cfg["test"].items()
    }
    train_cfg = training.TrainConfig(
        epochs=cfg["epochs"],
        batch_size=cfg["batch_size"],
        lr=cfg["lr"],
        dropout_p=cfg["dropout_p"],
        hidden_units=cfg["hidden_units"],
        adagrad_eps=cfg["adagrad_eps"],
    )
    echo = _config_echo(cfg)

    for sense_name in cfg["senses"]:
        target = _sense_by_name(sense_name)
        result = training.run_experiment(
            target,
            train_corpora,
            dev_rels,
            test_sets,
            store,
            train_cfg,
            runs=cfg["runs"],
            master_seed=cfg["master_seed"],
            jobs=jobs,
        )
        model_path = out_dir / f"model_{sense_name.lower()}.drm"
        model_path.write_bytes(result.best_model.save())
        for target_name, dist in result.distributions.items():
            test_rels = test_sets[target_name]
            n_pos = sum(1 for r in test_rels if corpus.top_sense(r) == target)
            payload = {
                "schema_version": evaluation.SCHEMA_VERSION,
                "toolkit_version": __version__,
                "task": sense_name,
                "training_corpora": result.training_corpora,
                "runs": result.runs,
                "master_seed": result.master_seed,
                "seeds": result.seeds,
                "config": echo,
                "dev_f1_per_run": result.dev_f1_per_run,
                "scores_per_target": {target_name: dist.scores},
                "baseline_per_target": {
                    target_name: evaluation.always_positive_baseline(
                        n_pos, len(test_rels) - n_pos
                    )
                },
            }
            results_path = out_dir / f"results_{sense_name.lower()}_{target_name}.json"
            results_path.write_bytes(_dump_json(payload))
            print(f"{sense_name} on {target_name}: {dist.summary()} -> {results_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args) -> int:
    clf = model.load_model(_read_bytes(args.model))
    store = embeddings.read_embedding_file(_read_bytes(args.emb))
    rels = corpus.select_implicit(_load_corpus(args.test))
    target = _sense_by_name(args.sense)
    counts = evaluation.evaluate_model(clf, rels, target, store)
    print(f"tp: {counts.tp}  fp: {counts.fp}  fn: {counts.fn}  tn: {counts.tn}")
    print(f"f1: {evaluation.f1(counts):.2f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare


def _load_results(paths) -> list[dict]:
    out = []
    for path in paths:
        try:
            obj = json.loads(_read_bytes(path))
        except json.JSONDecodeError as err:
            raise corpus.ParseError(f"invalid JSON ({err.msg})", path=path, line=err.lineno)
        if not isinstance(obj, dict):
            raise corpus.ParseError("expected a JSON object", path=path)
        obj["_path"] = path
        out.append(obj)
    return out


def cmd_compare(args) -> int:
    if len(args.results) < 2:
        raise UsageError("compare needs at least two run-results files")
    results = _load_results(args.results)
    evaluation._check_schema(results)
    target_sets = [frozenset(res["scores_per_target"]) for res in results]
    if len(set(target_sets)) != 1:
        raise evaluation.SchemaError(
            "run-results files cover different test targets: "
            + ", ".join(sorted(",".join(sorted(t)) for t in set(target_sets)))
        )
    targets = sorted(target_sets[0])
    for target in targets:
        named = []
        for res in results:
            name = "+".join(res["training_corpora"]) + f" [{res['task']}]"
            while any(name == n for n, _ in named):
                name += "'"
            named.append((name, [float(s) for s in res["scores_per_target"][target]]))
        print(f"target: {target}")
        for name, scores in named:
            print(f"  {name}: {evaluation.format_mean_std(scores)}  (n={len(scores)})")
        rows = evaluation.compare_distributions(named, alpha=args.alpha, sidedness=args.sidedness)
        for row in rows:
            mark = " *" if row["significant"] else ""
            print(
                f"  {row['better']} > {row['other']}: U={row['u_statistic']:.1f} "
                f"p={row['p_value']:.3g} [{row['method']}]{mark}"
            )
    return EXIT_OK


# ---------------------------------------------------------------------------
# report


def cmd_report(args) -> int:
    results = _load_results(args.results)
    md, tsv = evaluation.report(results)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.md").write_text(md, encoding="utf-8")
    (out_dir / "report.tsv").write_text(tsv, encoding="utf-8")
    print(f"wrote {out_dir / 'report.md'} and {out_dir / 'report.tsv'}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="drelkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"drelkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize a corpus into canonical JSONL")
    p.add_argument("inputs", nargs="+", help="input files")
    p.add_argument("--format", choices=("pipe", "jsonl"), required=True)
    p.add_argument("--output", required=True, help="canonical JSONL destination")
    p.add_argument("--column-map", help="JSON column map (pipe format only)")
    p.add_argument("--corpus", help="corpus name recorded per relation")
    p.add_argument("--lang", default="en", help="ISO-639-1 language code (pipe format)")
    p.add_argument("--doc-id", help="document id override (default: input file stem)")
    p.add_argument("--drop-extras", action="store_true", help="drop unknown JSONL keys")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("emb", help="embedding file utilities")
    emb_sub = p.add_subparsers(dest="emb_command", required=True)
    q = emb_sub.add_parser("inspect", help="validate an EMB1 file and print its header")
    q.add_argument("file")
    q.set_defaults(func=cmd_emb_inspect)
    q = emb_sub.add_parser("coverage", help="list corpus argument keys missing from a store")
    q.add_argument("file", help="EMB1 file")
    q.add_argument("--corpus", required=True, help="canonical JSONL corpus")
    q.set_defaults(func=cmd_emb_coverage)
    q = emb_sub.add_parser("import", help="convert 'key<TAB>floats' lines to EMB1")
    q.add_argument("input")
    q.add_argument("--output", required=True)
    q.add_argument("--l2-normalize", action="store_true")
    q.set_defaults(func=cmd_emb_import)

    p = sub.add_parser("train", help="run seeded one-vs-other experiments")
    p.add_argument("--config", help="experiment config JSON (flags override fields)")
    p.add_argument("--train", action="append", help="training corpora, comma separated")
    p.add_argument("--dev", help="dev corpus (JSONL)")
    p.add_argument("--test", action="append", help="test set as name=path (repeatable)")
    p.add_argument("--emb", help="EMB1 embedding file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--sense", action="append", help="target sense (repeatable; default all)")
    p.add_argument("--runs", type=int)
    p.add_argument("--master-seed", dest="master_seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--dropout", dest="dropout_p", type=float)
    p.add_argument("--hidden", dest="hidden_units", type=int)
    p.add_argument("--jobs", type=int, help="worker threads (default: DRELKIT_JOBS or 1)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model on a labeled test set")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--sense", required=True)
    p.add_argument("--emb", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="pairwise significance tests between run results")
    p.add_argument("results", nargs="+", help="run-results JSON files")
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--sidedness", choices=evaluation.SIDEDNESS, default="one-sided-greater")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="render Markdown and TSV tables from run results")
    p.add_argument("results", nargs="+", help="run-results JSON files")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as err:
        print(f"drelkit: usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except embeddings.CoverageError as err:
        for key in err.missing:
            print(f"missing: {key}", file=sys.stderr)
        print(f"drelkit: coverage error: {err}", file=sys.stderr)
        return EXIT_COVERAGE
    except (
        corpus.ParseError,
        corpus.SenseError,
        embeddings.EmbeddingFormatError,
        model.ModelFormatError,
        evaluation.SchemaError,
        training.TaskError,
        ValueError,
        OSError,
    ) as err:
        print(f"drelkit: error: {err}", file=sys.stderr)
        return EXIT_DATA


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
