"""Embedding stores, the EMB1 file format, and relation vector composition.

Run: python demos/02_embeddings_and_features.py
"""

import numpy as np

from drelkit.embeddings import (
    EmbeddingStore,
    key_for,
    missing_keys,
    read_embedding_file,
    write_embedding_file,
)
from drelkit.features import BLOCKS, compose

rng = np.random.default_rng(0)
dim = 8

# Keys are relation-scoped: "<relation-id>:arg1" / ":arg2". The same sentence
# in two different relations keeps two entries.
entries = []
for rel_id in ("r1", "r2", "r3"):
    for slot in ("arg1", "arg2"):
        entries.append((key_for(rel_id, slot), rng.normal(size=dim).astype(np.float32)))
store = EmbeddingStore(dim, entries)
print(f"store: dim={store.dim}, {len(store)} vectors")

# EMB1 is a small little-endian binary format; write/read is byte-stable.
blob = write_embedding_file(store)
again = read_embedding_file(blob)
print(f"EMB1 blob: {len(blob)} bytes, round-trip byte-identical:",
      write_embedding_file(again) == blob)

# A preflight coverage check runs before any training touches the store.
class FakeRel:
    rel_type = "Implicit"
    def __init__(self, rid):
        self.id = rid

print("missing for [r1, r9]:", missing_keys([FakeRel("r1"), FakeRel("r9")], store))

# The relation vector concatenates both argument vectors with their mean,
# signed difference and elementwise product: 5 * dim components.
v1 = store.lookup("r1", "arg1")
v2 = store.lookup("r1", "arg2")
feature = compose(v1, v2)
print(f"\ncomposed feature: {feature.shape[0]} components in blocks {BLOCKS}")

v = np.array([1.0, 2.0])
w = np.array([3.0, 4.0])
print("compose([1,2],[3,4]) =", compose(v, w))
print("swap symmetry: avg/mul blocks equal, sub negated:")
a, b = compose(v, w), compose(w, v)
print("  avg equal:", np.array_equal(a[4:6], b[4:6]),
      " mul equal:", np.array_equal(a[8:10], b[8:10]),
      " sub negated:", np.array_equal(a[6:8], -b[6:8]))
