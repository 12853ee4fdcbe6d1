"""Fixed-dimension sentence vector storage and the EMB1 on-disk format.

EMB1 is little-endian throughout: magic "EMB1", format version u16, dim u32,
count u64, then count records of [key_len u16, key UTF-8 bytes, dim * f32].
Keys are relation-scoped ("<relation-id>:arg1" / ":arg2") so identical
argument strings in different relations stay distinct. Vectors are stored
as 32-bit floats; model arithmetic upcasts to 64-bit after load.
"""

from __future__ import annotations

import struct
from typing import Iterable

import numpy as np

from .corpus import IMPLICIT, DiscourseRelation

MAGIC = b"EMB1"
FORMAT_VERSION = 1
SLOTS = ("arg1", "arg2")

_HEADER = struct.Struct("<HIQ")  # version, dim, count (after the 4-byte magic)
_HEADER_LEN = 4 + _HEADER.size


class EmbeddingFormatError(Exception):
    """The byte stream violates the EMB1 contract."""


class MissingKeyError(KeyError):
    """A lookup for a key the store does not hold."""

    def __init__(self, key: str):
        self.key = key
        super().__init__(key)

    def __str__(self) -> str:
        return f"no embedding for key {self.key!r}"


class CoverageError(Exception):
    """Argument vectors required by a corpus are absent from the store."""

    def __init__(self, missing: Iterable[str]):
        self.missing = list(missing)
        shown = ", ".join(self.missing[:5])
        more = "" if len(self.missing) <= 5 else f" (+{len(self.missing) - 5} more)"
        super().__init__(f"{len(self.missing)} missing embedding keys: {shown}{more}")


def key_for(relation_id: str, slot: str) -> str:
    if slot not in SLOTS:
        raise ValueError(f"slot must be one of {SLOTS}, got {slot!r}")
    return f"{relation_id}:{slot}"


class EmbeddingStore:
    """Immutable map from argument key to a float32 vector of fixed width.

    Safe for concurrent lookups: vectors are stored read-only and the store
    is never mutated after construction.
    """

    def __init__(self, dim: int, entries: Iterable[tuple[str, np.ndarray]] | dict):
        if int(dim) <= 0:
            raise ValueError("dim must be positive")
        self.dim = int(dim)
        self._entries: dict[str, np.ndarray] = {}
        items = entries.items() if isinstance(entries, dict) else entries
        for key, vec in items:
            if key in self._entries:
                raise ValueError(f"duplicate key {key!r}")
            arr = np.asarray(vec, dtype=np.float32)
            if arr.shape != (self.dim,):
                raise ValueError(f"vector for {key!r} has shape {arr.shape}, want ({self.dim},)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite component in vector for {key!r}")
            arr = arr.copy()
            arr.flags.writeable = False
            self._entries[key] = arr

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def keys(self):
        return self._entries.keys()

    def get(self, key: str) -> np.ndarray:
        try:
            return self._entries[key]
        except KeyError:
            raise MissingKeyError(key) from None

    def lookup(self, relation_id: str, slot: str) -> np.ndarray:
        """The stored vector for one argument of one relation, never mutated."""
        return self.get(key_for(relation_id, slot))


def read_embedding_file(data: bytes) -> EmbeddingStore:
    """Parse an EMB1 byte stream into a store.

    Rejects bad magic, unknown versions, dim = 0, truncated payloads,
    trailing bytes, duplicate keys and non-finite components.
    """
    if len(data) < _HEADER_LEN:
        raise EmbeddingFormatError("truncated header")
    if data[:4] != MAGIC:
        raise EmbeddingFormatError(f"bad magic {data[:4]!r}")
    version, dim, count = _HEADER.unpack_from(data, 4)
    if version != FORMAT_VERSION:
        raise EmbeddingFormatError(f"unsupported format version {version}")
    if dim == 0:
        raise EmbeddingFormatError("dim must be positive")
    offset = _HEADER_LEN
    vec_bytes = 4 * dim
    entries: list[tuple[str, np.ndarray]] = []
    for _ in range(count):
        if offset + 2 > len(data):
            raise EmbeddingFormatError("truncated record header")
        (key_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + key_len + vec_bytes > len(data):
            raise EmbeddingFormatError("truncated record payload")
        try:
            key = data[offset : offset + key_len].decode("utf-8")
        except UnicodeDecodeError as err:
            raise EmbeddingFormatError(f"key is not valid UTF-8: {err}") from err
        offset += key_len
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset)
        offset += vec_bytes
        entries.append((key, vec))
    if offset != len(data):
        raise EmbeddingFormatError(f"{len(data) - offset} trailing bytes after last record")
    try:
        return EmbeddingStore(dim, entries)
    except ValueError as err:
        raise EmbeddingFormatError(str(err)) from err


def write_embedding_file(store: EmbeddingStore) -> bytes:
    """Serialize a store as EMB1, preserving entry order (deterministic)."""
    parts = [MAGIC, _HEADER.pack(FORMAT_VERSION, store.dim, len(store))]
    for key in store.keys():
        raw = key.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError(f"key too long for EMB1: {key[:40]!r}...")
        parts.append(struct.pack("<H", len(raw)))
        parts.append(raw)
        parts.append(store.get(key).astype("<f4").tobytes())
    return b"".join(parts)


def missing_keys(relations: Iterable[DiscourseRelation], store: EmbeddingStore) -> list[str]:
    """Keys required by implicit relations but absent from the store, in order."""
    out: list[str] = []
    seen: set[str] = set()
    for rel in relations:
        if rel.rel_type != IMPLICIT:
            continue
        for slot in SLOTS:
            key = key_for(rel.id, slot)
            if key not in store and key not in seen:
                seen.add(key)
                out.append(key)
    return out


def check_coverage(relations: Iterable[DiscourseRelation], store: EmbeddingStore) -> None:
    """Preflight check: raise CoverageError listing every missing key."""
    miss = missing_keys(relations, store)
    if miss:
        raise CoverageError(miss)


def l2_normalized(store: EmbeddingStore) -> EmbeddingStore:
    """Copy of the store with unit-norm vectors; zero vectors are kept as-is."""
    entries = []
    for key in store.keys():
        vec = store.get(key).astype(np.float64)
        norm = float(np.linalg.norm(vec))
        entries.append((key, (vec / norm if norm > 0.0 else vec).astype(np.float32)))
    return EmbeddingStore(store.dim, entries)
