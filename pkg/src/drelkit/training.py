"""One-vs-other task construction, balanced-epoch training with dev-based
model selection, and multi-run experiment orchestration.

Every source of randomness in a run (initialization, negative sampling,
dropout, shuffling) flows from the run's single seed, so experiments are
bit-reproducible. Multi-run experiments derive per-run seeds from a master
seed with splitmix64 and record them.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import evaluation
from .corpus import DiscourseRelation, SenseTop, top_sense
from .embeddings import EmbeddingStore, check_coverage
from .features import compose
from .model import MlpClassifier, TrainExample

log = logging.getLogger(__name__)

_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def _mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(master_seed: int, run_index: int) -> int:
    """Per-run seed: run i takes the i-th output of splitmix64 seeded by master_seed."""
    if run_index < 0:
        raise ValueError("run_index must be non-negative")
    return _mix64((master_seed + (run_index + 1) * _GOLDEN) & _MASK)


class TaskError(ValueError):
    """A one-vs-other task without both classes is undefined."""


@dataclass
class TrainConfig:
    """Hyperparameters of one training run.

    Everything here is echoed into run metadata so experiments stay
    auditable; selection is always positive-class F1 on the dev set.
    """

    epochs: int = 50
    batch_size: int = 64
    lr: float = 0.01
    dropout_p: float = 0.3
    hidden_units: int = 100
    adagrad_eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError("dropout_p must be in [0, 1)")
        if self.epochs < 0 or self.batch_size < 1:
            raise ValueError("epochs must be >= 0 and batch_size >= 1")


@dataclass
class BinaryTask:
    """One-vs-other task: positives carry the target sense, negatives the rest."""

    target: SenseTop
    positives: list[DiscourseRelation]
    negatives: list[DiscourseRelation]


def build_task(relations: Iterable[DiscourseRelation], target: SenseTop) -> BinaryTask:
    """Split implicit relations by the first-label rule against one target sense."""
    pos: list[DiscourseRelation] = []
    neg: list[DiscourseRelation] = []
    for rel in relations:
        (pos if top_sense(rel) == target else neg).append(rel)
    if not pos:
        raise TaskError(f"no positive instances for {target.value}")
    if not neg:
        raise TaskError(f"no negative instances for {target.value}")
    return BinaryTask(target=target, positives=pos, negatives=neg)


def balanced_epoch(task: BinaryTask, rng: np.random.Generator) -> list[tuple[DiscourseRelation, int]]:
    """All positives plus an equal-size fresh random sample of negatives, shuffled.

    Negatives are sampled without replacement when there are enough of them,
    otherwise with replacement (train_run records that case). A new sample
    is drawn every call.
    """
    n_pos = len(task.positives)
    n_neg = len(task.negatives)
    if n_pos == 0 or n_neg == 0:
        raise TaskError("empty task")
    idx = rng.choice(n_neg, size=n_pos, replace=n_neg < n_pos)
    examples = [(rel, 1) for rel in task.positives] + [(task.negatives[i], 0) for i in idx]
    order = rng.permutation(len(examples))
    return [examples[i] for i in order]


def feature_cache(
    relations: Iterable[DiscourseRelation], store: EmbeddingStore
) -> dict[str, np.ndarray]:
    """id -> composed relation vector; fails fast (CoverageError) on missing keys."""
    relations = list(relations)
    check_coverage(relations, store)
    return {
        rel.id: compose(store.lookup(rel.id, "arg1"), store.lookup(rel.id, "arg2"))
        for rel in relations
    }


def labeled_arrays(
    relations: Sequence[DiscourseRelation],
    target: SenseTop,
    cache: Mapping[str, np.ndarray],
) -> tuple[np.ndarray, np.ndarray]:
    X = np.stack([cache[rel.id] for rel in relations])
    y = np.array([1.0 if top_sense(rel) == target else 0.0 for rel in relations])
    return X, y


@dataclass
class TrainResult:
    model: MlpClassifier
    dev_f1: float
    best_epoch: int
    epoch_dev_f1: list[float]  # index 0 is the untrained model
    sampled_with_replacement: bool


def train_run(
    task: BinaryTask,
    dev_relations: Sequence[DiscourseRelation],
    store: EmbeddingStore,
    cfg: TrainConfig,
    _cache: dict[str, np.ndarray] | None = None,
) -> TrainResult:
    """Train for cfg.epochs balanced epochs and return the best-dev-F1 snapshot.

    Dev F1 is positive-class F1 at threshold 0.5 over the full unbalanced
    dev set, evaluated once before training and after every epoch; ties keep
    the earlier epoch. With epochs = 0 the initialized model is returned
    with its dev F1.
    """
    if not dev_relations:
        raise TaskError("dev set is empty")
    rng = np.random.default_rng(cfg.seed)
    cache = _cache
    if cache is None:
        cache = feature_cache(list(task.positives) + list(task.negatives) + list(dev_relations), store)
    X_dev, y_dev = labeled_arrays(dev_relations, task.target, cache)
    model = MlpClassifier(
        in_dim=5 * store.dim,
        hidden=cfg.hidden_units,
        lr=cfg.lr,
        dropout_p=cfg.dropout_p,
        eps=cfg.adagrad_eps,
        seed=cfg.seed,
        rng=rng,
    )
    with_replacement = len(task.negatives) < len(task.positives)
    if with_replacement:
        log.warning(
            "fewer negatives (%d) than positives (%d) for %s; sampling with replacement",
            len(task.negatives),
            len(task.positives),
            task.target.value,
        )

    def dev_f1_of(m: MlpClassifier) -> float:
        return evaluation.f1(evaluation.confusion(y_dev, m.predict_many(X_dev)))

    history = [dev_f1_of(model)]
    best_score, best_epoch, best_model = history[0], 0, model.copy()
    for epoch in range(1, cfg.epochs + 1):
        epoch_examples = balanced_epoch(task, rng)
        for start in range(0, len(epoch_examples), cfg.batch_size):
            chunk = epoch_examples[start : start + cfg.batch_size]
            batch = [TrainExample(feature=cache[rel.id], label=float(lab)) for rel, lab in chunk]
            grads = model.backward(batch, rng if cfg.dropout_p > 0.0 else None)
            model.adagrad_step(grads)
        score = dev_f1_of(model)
        history.append(score)
        if score > best_score:
            best_score, best_epoch, best_model = score, epoch, model.copy()
    return TrainResult(
        model=best_model,
        dev_f1=best_score,
        best_epoch=best_epoch,
        epoch_dev_f1=history,
        sampled_with_replacement=with_replacement,
    )


@dataclass
class RunDistribution:
    """Per-run F1 scores of one repeated experiment on one test target."""

    task: SenseTop
    training_corpora: list[str]
    scores: list[float]  # F1 percentages, one per run
    seeds: list[int]

    def __post_init__(self):
        if len(self.scores) != len(self.seeds):
            raise ValueError("scores and seeds must have equal length")
        if any(not 0.0 <= s <= 100.0 for s in self.scores):
            raise ValueError("scores must be percentages in [0, 100]")

    @property
    def mean(self) -> float:
        return float(np.mean(self.scores))

    @property
    def std(self) -> float:
        """Sample standard deviation; reported as 0 for a single run."""
        if len(self.scores) < 2:
            return 0.0
        return float(np.std(self.scores, ddof=1))

    def summary(self) -> str:
        return evaluation.format_mean_std(self.scores)


@dataclass
class ExperimentResult:
    target: SenseTop
    training_corpora: list[str]
    runs: int
    master_seed: int
    seeds: list[int]
    dev_f1_per_run: list[float]
    distributions: dict[str, RunDistribution]
    best_model: MlpClassifier
    best_run: int


def run_experiment(
    target: SenseTop,
    train_corpora: Sequence[tuple[str, Sequence[DiscourseRelation]]],
    dev_relations: Sequence[DiscourseRelation],
    test_sets: Mapping[str, Sequence[DiscourseRelation]],
    store: EmbeddingStore,
    cfg: TrainConfig,
    runs: int = 100,
    master_seed: int = 0,
    jobs: int = 1,
) -> ExperimentResult:
    """Pool the training corpora, run `runs` independent seeded trainings,
    and score every selected model on every test set.

    Pooling is plain concatenation, so the training multiset is the multiset
    union of the corpora. Runs are independent (each owns its model and rng)
    and may execute on a bounded thread pool; score lists are always ordered
    by run index. Any failed run aborts the whole experiment.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    names = [name for name, _ in train_corpora]
    pooled = [rel for _, rels in train_corpora for rel in rels]
    task = build_task(pooled, target)
    everything = pooled + list(dev_relations)
    for rels in test_sets.values():
        everything.extend(rels)
    cache = feature_cache(everything, store)
    test_arrays = {
        name: labeled_arrays(list(rels), target, cache) for name, rels in test_sets.items()
    }
    seeds = [derive_seed(master_seed, i) for i in range(runs)]

    def one_run(i: int) -> tuple[TrainResult, dict[str, float]]:
        result = train_run(task, dev_relations, store, replace(cfg, seed=seeds[i]), _cache=cache)
        scores = {
            name: evaluation.f1(evaluation.confusion(y, result.model.predict_many(X)))
            for name, (X, y) in test_arrays.items()
        }
        return result, scores

    if jobs == 1:
        outcomes = [one_run(i) for i in range(runs)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(one_run, range(runs)))

    distributions = {
        name: RunDistribution(
            task=target,
            training_corpora=list(names),
            scores=[outcomes[i][1][name] for i in range(runs)],
            seeds=list(seeds),
        )
        for name in test_sets
    }
    dev_f1s = [outcomes[i][0].dev_f1 for i in range(runs)]
    best_run = max(range(runs), key=lambda i: (dev_f1s[i], -i))
    return ExperimentResult(
        target=target,
        training_corpora=list(names),
        runs=runs,
        master_seed=master_seed,
        seeds=seeds,
        dev_f1_per_run=dev_f1s,
        distributions=distributions,
        best_model=outcomes[best_run][0].model,
        best_run=best_run,
    )
