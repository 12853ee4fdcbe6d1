"""Multi-run experiments, pooled training corpora, and significance testing.

Runs two training setups (single corpus vs pooled) a number of times each,
then compares the score distributions with the Mann-Whitney U test and
renders the report tables.

Run: python demos/04_experiments_and_significance.py
"""

import numpy as np

from drelkit import evaluation
from drelkit.corpus import DiscourseRelation, SenseTop
from drelkit.embeddings import EmbeddingStore, key_for
from drelkit.training import TrainConfig, run_experiment

rng = np.random.default_rng(11)
dim = 12
direction = rng.normal(size=dim)
direction /= np.linalg.norm(direction)

def make_corpus(n_pos, n_neg, prefix, noise=1.0):
    rels, entries = [], []
    others = [SenseTop.EXPANSION, SenseTop.CONTINGENCY, SenseTop.COMPARISON]
    for k in range(n_pos + n_neg):
        label = k < n_pos
        sense = SenseTop.TEMPORAL if label else others[k % 3]
        rel = DiscourseRelation(
            id=f"{prefix}{k}", corpus=prefix, lang="en", doc_id="doc_00",
            rel_type="Implicit", senses=(sense.value,),
            arg1=f"a1 {prefix}{k}", arg2=f"a2 {prefix}{k}",
        )
        rels.append(rel)
        center = 1.2 * direction if label else -1.2 * direction
        for slot in ("arg1", "arg2"):
            entries.append((key_for(rel.id, slot), (center + noise * rng.normal(size=dim)).astype(np.float32)))
    return rels, entries

main_rels, e1 = make_corpus(60, 60, "main")
extra_rels, e2 = make_corpus(40, 40, "extra")
dev_rels, e3 = make_corpus(25, 25, "dev")
test_rels, e4 = make_corpus(30, 30, "test")
store = EmbeddingStore(dim, e1 + e2 + e3 + e4)

cfg = TrainConfig(epochs=8)
runs = 30
setups = {
    "main": [("main", main_rels)],
    "main+extra": [("main", main_rels), ("extra", extra_rels)],  # pooled training
}
distributions = []
results_payloads = []
for name, corpora in setups.items():
    result = run_experiment(
        SenseTop.TEMPORAL, corpora, dev_rels, {"synth-test": test_rels},
        store, cfg, runs=runs, master_seed=99,
    )
    dist = result.distributions["synth-test"]
    print(f"{name:11s} -> {dist.summary()}  (first seeds: {result.seeds[:3]})")
    distributions.append((name, dist.scores))
    n_pos = 30
    results_payloads.append({
        "schema_version": evaluation.SCHEMA_VERSION,
        "toolkit_version": "0.1.0",
        "task": "Temporal",
        "training_corpora": [c for c, _ in corpora],
        "runs": runs,
        "master_seed": 99,
        "seeds": result.seeds,
        "config": {},
        "dev_f1_per_run": result.dev_f1_per_run,
        "scores_per_target": {"synth-test": dist.scores},
        "baseline_per_target": {
            "synth-test": evaluation.always_positive_baseline(n_pos, len(test_rels) - n_pos)
        },
    })

print("\npairwise Mann-Whitney U (one-sided, alpha = 0.001):")
for row in evaluation.compare_distributions(distributions):
    mark = "significant" if row["significant"] else "not significant"
    print(f"  {row['better']} > {row['other']}: U={row['u_statistic']:.1f} "
          f"p={row['p_value']:.3g} [{row['method']}] -> {mark}")

md, tsv = evaluation.report(results_payloads)
print("\n--- report.md ---")
print(md)
print("--- report.tsv ---")
print(tsv)
