import json

import numpy as np
import pytest

from drelkit import cli
from drelkit.corpus import write_jsonl
from drelkit.embeddings import EmbeddingStore, write_embedding_file
from drelkit.evaluation import SCHEMA_VERSION

from conftest import TEDMDB, cluster_corpus, make_corpus


def run_cli(args):
    return cli.main(args)


def synth_experiment(tmp_path, seed=1234, dim=8):
    rels, entries = cluster_corpus(60, 60, dim=dim, seed=seed)
    store = EmbeddingStore(dim, entries)
    pos, neg = rels[:60], rels[60:]
    paths = {}
    for name, subset in (
        ("train", pos[:30] + neg[:30]),
        ("dev", pos[30:45] + neg[30:45]),
        ("test", pos[45:] + neg[45:]),
    ):
        p = tmp_path / f"{name}.jsonl"
        p.write_bytes(write_jsonl(subset))
        paths[name] = p
    emb = tmp_path / "vectors.emb"
    emb.write_bytes(write_embedding_file(store))
    paths["emb"] = emb
    return paths


def results_file(tmp_path, name, task="Temporal", corpora=("pdtb3",), target="en", scores=(50.0,)):
    payload = {
        "schema_version": SCHEMA_VERSION,
        "toolkit_version": "0.1.0",
        "task": task,
        "training_corpora": list(corpora),
        "runs": len(scores),
        "master_seed": 0,
        "seeds": list(range(len(scores))),
        "config": {},
        "dev_f1_per_run": [],
        "scores_per_target": {target: list(scores)},
        "baseline_per_target": {target: 18.28},
    }
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


# ---------------------------------------------------------------------------
# ingest


def test_ingest_jsonl_summary(tmp_path, capsys):
    src = tmp_path / "en.jsonl"
    src.write_bytes(write_jsonl(make_corpus(TEDMDB["en"], corpus="ted-mdb")))
    out = tmp_path / "out.jsonl"
    assert run_cli(["ingest", str(src), "--format", "jsonl", "--output", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "Implicit: 194" in stdout
    assert "Expansion: 107" in stdout
    assert out.read_bytes() == src.read_bytes()


def test_ingest_empty_file(tmp_path, capsys):
    src = tmp_path / "empty.jsonl"
    src.write_bytes(b"")
    out = tmp_path / "out.jsonl"
    assert run_cli(["ingest", str(src), "--format", "jsonl", "--output", str(out)]) == 0
    assert "Implicit: 0" in capsys.readouterr().out
    assert out.read_bytes() == b""


def test_ingest_pipe_requires_column_map(tmp_path, capsys):
    src = tmp_path / "doc_01.pipe"
    src.write_text("Implicit|Temporal||a|b\n")
    code = run_cli(["ingest", str(src), "--format", "pipe", "--output", str(tmp_path / "o.jsonl")])
    assert code == 64


def test_ingest_pipe_with_column_map(tmp_path, capsys):
    cmap = tmp_path / "map.json"
    cmap.write_text(json.dumps(
        {"field_count_min": 5, "rel_type_idx": 0, "sense_idxs": [1, 2], "arg1_idx": 3, "arg2_idx": 4}
    ))
    src = tmp_path / "wsj_2102.pipe"
    src.write_text("Implicit|Contingency.Cause||arg one|arg two\nEntRel|||x|y\n")
    out = tmp_path / "out.jsonl"
    code = run_cli([
        "ingest", str(src), "--format", "pipe", "--column-map", str(cmap), "--output", str(out),
    ])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "Implicit: 1" in stdout and "EntRel: 1" in stdout
    assert b'"id": "wsj_2102#1"' in out.read_bytes()


def test_ingest_parse_error_exit_2(tmp_path, capsys):
    src = tmp_path / "bad.jsonl"
    src.write_text('{"id": "x"}\n')
    code = run_cli(["ingest", str(src), "--format", "jsonl", "--output", str(tmp_path / "o")])
    assert code == 2
    assert "bad.jsonl:1" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# emb


def test_emb_import_inspect_coverage(tmp_path, capsys):
    rels = make_corpus((1, 1, 0, 0), prefix="c")
    tsv = tmp_path / "vecs.tsv"
    lines = []
    for rel in rels:
        lines.append(f"{rel.id}:arg1\t0.5 1.5 -2.0")
        lines.append(f"{rel.id}:arg2\t1.0 0.0 0.25")
    tsv.write_text("\n".join(lines) + "\n")
    emb = tmp_path / "vecs.emb"
    assert run_cli(["emb", "import", str(tsv), "--output", str(emb)]) == 0
    out = capsys.readouterr().out
    assert "dim: 3" in out and "count: 4" in out

    assert run_cli(["emb", "inspect", str(emb)]) == 0
    assert "OK" in capsys.readouterr().out

    corpus_path = tmp_path / "c.jsonl"
    corpus_path.write_bytes(write_jsonl(rels))
    assert run_cli(["emb", "coverage", str(emb), "--corpus", str(corpus_path)]) == 0
    assert "coverage OK" in capsys.readouterr().out

    # Drop one record and expect exit 3 naming the key.
    short = tmp_path / "short.tsv"
    short.write_text("\n".join(lines[:-1]) + "\n")
    emb2 = tmp_path / "short.emb"
    run_cli(["emb", "import", str(short), "--output", str(emb2)])
    capsys.readouterr()
    assert run_cli(["emb", "coverage", str(emb2), "--corpus", str(corpus_path)]) == 3
    assert "missing: c1:arg2" in capsys.readouterr().out


def test_emb_inspect_rejects_garbage(tmp_path, capsys):
    bad = tmp_path / "bad.emb"
    bad.write_bytes(b"not an embedding file")
    assert run_cli(["emb", "inspect", str(bad)]) == 2


def test_emb_import_l2_normalize(tmp_path, capsys):
    tsv = tmp_path / "v.tsv"
    tsv.write_text("k:arg1\t3.0 4.0\n")
    emb = tmp_path / "v.emb"
    assert run_cli(["emb", "import", str(tsv), "--output", str(emb), "--l2-normalize"]) == 0
    assert "l2_normalized: true" in capsys.readouterr().out
    from drelkit.embeddings import read_embedding_file

    store = read_embedding_file(emb.read_bytes())
    np.testing.assert_allclose(store.get("k:arg1"), [0.6, 0.8], rtol=1e-6)


# ---------------------------------------------------------------------------
# train


def test_train_single_run_writes_results(tmp_path, capsys):
    paths = synth_experiment(tmp_path)
    out_dir = tmp_path / "out"
    code = run_cli([
        "train",
        "--train", str(paths["train"]),
        "--dev", str(paths["dev"]),
        "--test", f"synth={paths['test']}",
        "--emb", str(paths["emb"]),
        "--out", str(out_dir),
        "--sense", "Temporal",
        "--runs", "1",
        "--epochs", "2",
        "--master-seed", "7",
    ])
    assert code == 0
    results = json.loads((out_dir / "results_temporal_synth.json").read_text())
    assert results["schema_version"] == SCHEMA_VERSION
    assert len(results["scores_per_target"]["synth"]) == 1
    assert results["training_corpora"] == ["train"]
    assert results["config"]["master_seed"] == 7
    assert (out_dir / "model_temporal.drm").exists()


def test_train_deterministic_byte_identical(tmp_path):
    paths = synth_experiment(tmp_path)
    args = [
        "train",
        "--train", str(paths["train"]),
        "--dev", str(paths["dev"]),
        "--test", f"synth={paths['test']}",
        "--emb", str(paths["emb"]),
        "--sense", "Temporal",
        "--runs", "2",
        "--epochs", "2",
        "--master-seed", "5",
    ]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run_cli(args + ["--out", str(out_a)]) == 0
    assert run_cli(args + ["--out", str(out_b), "--jobs", "2"]) == 0
    name = "results_temporal_synth.json"
    # Identical bytes even across --jobs settings; outputs carry no timestamps.
    assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    assert (out_a / "model_temporal.drm").read_bytes() == (out_b / "model_temporal.drm").read_bytes()


def test_train_uncovered_second_corpus_is_coverage_error(tmp_path):
    paths = synth_experiment(tmp_path)
    rels, _ = cluster_corpus(3, 3, dim=8, seed=55, prefix="uncovered")
    second = tmp_path / "extra.jsonl"
    second.write_bytes(write_jsonl(rels))
    code = run_cli([
        "train",
        "--train", f"{paths['train']},{second}",
        "--dev", str(paths["dev"]),
        "--test", f"synth={paths['test']}",
        "--emb", str(paths["emb"]),
        "--out", str(tmp_path / "out"),
        "--sense", "Temporal",
        "--runs", "1",
        "--epochs", "1",
    ])
    assert code == 3


def test_train_pooled_two_corpora(tmp_path):
    paths = synth_experiment(tmp_path)
    rels, entries = cluster_corpus(10, 10, dim=8, seed=77, prefix="q")
    extra = tmp_path / "extra.jsonl"
    extra.write_bytes(write_jsonl(rels))
    from drelkit.embeddings import read_embedding_file

    base = read_embedding_file(paths["emb"].read_bytes())
    merged = EmbeddingStore(8, [(k, base.get(k)) for k in base.keys()] + entries)
    emb = tmp_path / "merged.emb"
    emb.write_bytes(write_embedding_file(merged))
    out_dir = tmp_path / "out"
    code = run_cli([
        "train",
        "--train", f"{paths['train']},{extra}",
        "--dev", str(paths["dev"]),
        "--test", f"synth={paths['test']}",
        "--emb", str(emb),
        "--out", str(out_dir),
        "--sense", "Temporal",
        "--runs", "1",
        "--epochs", "1",
    ])
    assert code == 0
    results = json.loads((out_dir / "results_temporal_synth.json").read_text())
    assert results["training_corpora"] == ["train", "extra"]


def test_train_coverage_error_lists_missing_keys(tmp_path, capsys):
    paths = synth_experiment(tmp_path)
    empty = tmp_path / "empty.emb"
    empty.write_bytes(write_embedding_file(EmbeddingStore(8, [])))
    code = run_cli([
        "train",
        "--train", str(paths["train"]),
        "--dev", str(paths["dev"]),
        "--test", f"synth={paths['test']}",
        "--emb", str(empty),
        "--out", str(tmp_path / "out"),
        "--sense", "Temporal",
        "--runs", "1",
    ])
    assert code == 3
    err = capsys.readouterr().err
    assert "missing: " in err and "coverage error" in err


def test_train_missing_config_field_is_usage_error(tmp_path):
    assert run_cli(["train", "--dev", "nowhere.jsonl"]) == 64


def test_train_missing_file_is_data_error(tmp_path):
    paths = synth_experiment(tmp_path)
    code = run_cli([
        "train",
        "--train", str(tmp_path / "nope.jsonl"),
        "--dev", str(paths["dev"]),
        "--test", f"synth={paths['test']}",
        "--emb", str(paths["emb"]),
        "--out", str(tmp_path / "out"),
    ])
    assert code == 2


def test_train_config_file_with_flag_override(tmp_path, capsys):
    paths = synth_experiment(tmp_path)
    config = {
        "train": [str(paths["train"])],
        "dev": str(paths["dev"]),
        "test": {"synth": str(paths["test"])},
        "embeddings": str(paths["emb"]),
        "out_dir": str(tmp_path / "out"),
        "senses": ["Temporal"],
        "runs": 1,
        "epochs": 1,
        "master_seed": 3,
    }
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps(config))
    assert run_cli(["train", "--config", str(cfg_path), "--runs", "2"]) == 0
    results = json.loads((tmp_path / "out" / "results_temporal_synth.json").read_text())
    assert results["runs"] == 2  # flag overrode the config file
    assert results["config"]["epochs"] == 1


# ---------------------------------------------------------------------------
# eval


def test_eval_command(tmp_path, capsys):
    paths = synth_experiment(tmp_path)
    out_dir = tmp_path / "out"
    run_cli([
        "train",
        "--train", str(paths["train"]),
        "--dev", str(paths["dev"]),
        "--test", f"synth={paths['test']}",
        "--emb", str(paths["emb"]),
        "--out", str(out_dir),
        "--sense", "Temporal",
        "--runs", "1",
        "--epochs", "3",
    ])
    capsys.readouterr()
    code = run_cli([
        "eval",
        "--model", str(out_dir / "model_temporal.drm"),
        "--test", str(paths["test"]),
        "--sense", "Temporal",
        "--emb", str(paths["emb"]),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "f1:" in out and "tp:" in out


# ---------------------------------------------------------------------------
# compare


def test_compare_distribution_against_itself(tmp_path, capsys):
    rng = np.random.default_rng(0)
    scores = tuple(rng.normal(50, 1, 50))
    a = results_file(tmp_path, "a.json", corpora=("pdtb3",), scores=scores)
    b = results_file(tmp_path, "b.json", corpora=("tdb",), scores=scores)
    assert run_cli(["compare", str(a), str(b)]) == 0
    out = capsys.readouterr().out
    assert "p=" in out and " *" not in out


def test_compare_shifted_distributions_significant(tmp_path, capsys):
    rng = np.random.default_rng(1)
    base = rng.normal(40, 1, 100)
    a = results_file(tmp_path, "a.json", corpora=("pdtb3",), scores=tuple(base + 10))
    b = results_file(tmp_path, "b.json", corpora=("tdb",), scores=tuple(base))
    assert run_cli(["compare", str(a), str(b)]) == 0
    assert " *" in capsys.readouterr().out


def test_compare_three_setups_three_rows(tmp_path, capsys):
    rng = np.random.default_rng(2)
    files = [
        results_file(tmp_path, f"{name}.json", corpora=(name,), scores=tuple(rng.normal(40 + i, 1, 20)))
        for i, name in enumerate(("pdtb3", "tdb", "pooled"))
    ]
    assert run_cli(["compare", *map(str, files)]) == 0
    out = capsys.readouterr().out
    assert sum(" > " in line for line in out.splitlines()) == 3


def test_compare_mismatched_targets_exit_2(tmp_path, capsys):
    a = results_file(tmp_path, "a.json", target="en")
    b = results_file(tmp_path, "b.json", target="de")
    assert run_cli(["compare", str(a), str(b)]) == 2


def test_compare_needs_two_files(tmp_path):
    a = results_file(tmp_path, "a.json")
    assert run_cli(["compare", str(a)]) == 64


# ---------------------------------------------------------------------------
# report


def test_report_writes_md_and_tsv(tmp_path, capsys):
    rng = np.random.default_rng(3)
    a = results_file(tmp_path, "a.json", scores=tuple(rng.normal(36, 1, 30)))
    out_dir = tmp_path / "rep"
    assert run_cli(["report", str(a), "--out-dir", str(out_dir)]) == 0
    md = (out_dir / "report.md").read_text()
    tsv = (out_dir / "report.tsv").read_text()
    assert "| en |" in md
    assert tsv.startswith("language\tsense\tmean\tstd\tn_runs\tbaseline")


def test_usage_error_on_unknown_command():
    assert run_cli(["frobnicate"]) == 64


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(["--version"])
    assert exc.value.code == 0
