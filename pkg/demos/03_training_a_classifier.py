"""Training one binary classifier on a synthetic separable task.

Builds a one-vs-other task from a two-cluster corpus, trains with balanced
negative resampling, and shows dev-based model selection at work.

Run: python demos/03_training_a_classifier.py
"""

import numpy as np

from drelkit import evaluation
from drelkit.corpus import DiscourseRelation, SenseTop
from drelkit.embeddings import EmbeddingStore, key_for
from drelkit.training import (
    TrainConfig,
    balanced_epoch,
    build_task,
    feature_cache,
    labeled_arrays,
    train_run,
)

rng = np.random.default_rng(7)
dim = 16
direction = rng.normal(size=dim)
direction /= np.linalg.norm(direction)

def make_split(n_pos, n_neg, prefix):
    """Relations whose argument vectors sit in one of two Gaussian clusters 4 sigma apart."""
    rels, entries = [], []
    senses = [SenseTop.TEMPORAL] * n_pos + [SenseTop.EXPANSION, SenseTop.CONTINGENCY, SenseTop.COMPARISON] * n_neg
    for k in range(n_pos + n_neg):
        label = k < n_pos
        rel = DiscourseRelation(
            id=f"{prefix}{k}", corpus="synth", lang="en", doc_id="doc_00",
            rel_type="Implicit", senses=(senses[k].value,),
            arg1=f"argument one {k}", arg2=f"argument two {k}",
        )
        rels.append(rel)
        center = 2.0 * direction if label else -2.0 * direction
        for slot in ("arg1", "arg2"):
            entries.append((key_for(rel.id, slot), (center + rng.normal(size=dim)).astype(np.float32)))
    return rels, entries

train_rels, e1 = make_split(120, 120, "tr")
dev_rels, e2 = make_split(40, 40, "dv")
test_rels, e3 = make_split(40, 40, "te")
store = EmbeddingStore(dim, e1 + e2 + e3)

task = build_task(train_rels, SenseTop.TEMPORAL)
print(f"task: {len(task.positives)} positives vs {len(task.negatives)} negatives")

# Every epoch keeps all positives and redraws an equal number of negatives.
epoch = balanced_epoch(task, np.random.default_rng(0))
print(f"balanced epoch: {len(epoch)} examples, "
      f"{sum(lab for _, lab in epoch)} positive / {sum(1 - lab for _, lab in epoch)} negative")

cfg = TrainConfig(epochs=15, seed=42)
result = train_run(task, dev_rels, store, cfg)
print(f"\nper-epoch dev F1 (epoch 0 is the untrained model):")
print("  " + " ".join(f"{s:5.1f}" for s in result.epoch_dev_f1))
print(f"selected epoch {result.best_epoch} with dev F1 {result.dev_f1:.2f}")

cache = feature_cache(test_rels, store)
X, y = labeled_arrays(test_rels, SenseTop.TEMPORAL, cache)
counts = evaluation.confusion(y, result.model.predict_many(X))
print(f"test: tp={counts.tp} fp={counts.fp} fn={counts.fn} tn={counts.tn} "
      f"-> F1 {evaluation.f1(counts):.2f}")
