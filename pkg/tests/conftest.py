"""Shared synthetic fixtures.

Corpus statistics from the reference datasets serve as frozen validation
fixtures: generators here produce corpora with exactly those per-sense
counts. The Gaussian cluster fixture drives the end-to-end learnability
checks.
"""

from __future__ import annotations

import numpy as np
import pytest

from drelkit.corpus import IMPLICIT, DiscourseRelation, SenseTop
from drelkit.embeddings import EmbeddingStore, key_for

# (Comparison, Contingency, Expansion, Temporal) implicit-relation counts.
PDTB2_TEST = (146, 276, 556, 68)
PDTB3_TRAIN = (1828, 5872, 7939, 1413)
PDTB3_DEV = (404, 1159, 1466, 230)
PDTB3_TEST = (153, 527, 643, 148)
TEDMDB = {
    "en": (20, 52, 107, 15),
    "de": (13, 41, 148, 12),
    "lt": (26, 53, 154, 13),
    "pl": (19, 28, 130, 18),
    "pt": (23, 47, 169, 15),
    "ru": (16, 31, 169, 5),
    "tr": (20, 29, 140, 13),
}
TDB_TRAIN = (71, 142, 363, 73)
TDB_DEV = (11, 31, 49, 21)

SENSE_ORDER = tuple(SenseTop)

_SUBSENSE = {
    SenseTop.COMPARISON: "Comparison.Contrast",
    SenseTop.CONTINGENCY: "Contingency.Cause.Reason",
    SenseTop.EXPANSION: "Expansion.Conjunction",
    SenseTop.TEMPORAL: "Temporal.Asynchronous",
}


def make_relation(
    rel_id: str,
    sense: SenseTop | str,
    *,
    corpus: str = "test",
    lang: str = "en",
    doc_id: str = "doc_00",
    rel_type: str = IMPLICIT,
    subsense: bool = False,
) -> DiscourseRelation:
    if isinstance(sense, SenseTop):
        sense_str = _SUBSENSE[sense] if subsense else sense.value
    else:
        sense_str = sense
    return DiscourseRelation(
        id=rel_id,
        corpus=corpus,
        lang=lang,
        doc_id=doc_id,
        rel_type=rel_type,
        senses=(sense_str,),
        arg1=f"first argument of {rel_id}",
        arg2=f"second argument of {rel_id}",
    )


def make_corpus(
    counts,
    *,
    corpus: str = "test",
    lang: str = "en",
    prefix: str = "r",
    doc_id: str = "doc_00",
) -> list[DiscourseRelation]:
    """Implicit relations with exactly `counts` per sense, in sense order."""
    rels = []
    k = 0
    for sense, count in zip(SENSE_ORDER, counts):
        for _ in range(count):
            rels.append(
                make_relation(
                    f"{prefix}{k}",
                    sense,
                    corpus=corpus,
                    lang=lang,
                    doc_id=doc_id,
                    subsense=k % 2 == 0,
                )
            )
            k += 1
    return rels


def random_store(relations, dim: int, seed: int = 0) -> EmbeddingStore:
    """Standard normal float32 vectors for every argument of every relation."""
    rng = np.random.default_rng(seed)
    entries = []
    for rel in relations:
        for slot in ("arg1", "arg2"):
            entries.append((key_for(rel.id, slot), rng.normal(size=dim).astype(np.float32)))
    return EmbeddingStore(dim, entries)


def cluster_corpus(
    n_pos: int,
    n_neg: int,
    *,
    dim: int = 16,
    seed: int = 0,
    prefix: str = "s",
    target: SenseTop = SenseTop.TEMPORAL,
):
    """Relations whose argument vectors come from two Gaussian clusters.

    Cluster means sit 4 standard deviations apart (unit covariance), so the
    classes are almost linearly separable in feature space. Returns
    (relations, entries) with entries ready for an EmbeddingStore.
    """
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=dim)
    direction /= np.linalg.norm(direction)
    mu = 2.0 * direction  # +mu vs -mu: separation 4 sigma
    other_senses = [s for s in SENSE_ORDER if s != target]
    rels, entries = [], []
    labels = [1] * n_pos + [0] * n_neg
    for k, label in enumerate(labels):
        sense = target if label else other_senses[k % 3]
        rel = make_relation(f"{prefix}{k}", sense, corpus="synth")
        rels.append(rel)
        center = mu if label else -mu
        for slot in ("arg1", "arg2"):
            vec = (center + rng.normal(size=dim)).astype(np.float32)
            entries.append((key_for(rel.id, slot), vec))
    return rels, entries


@pytest.fixture
def tiny_store():
    rels = make_corpus((2, 2, 2, 2))
    return rels, random_store(rels, dim=4, seed=7)
