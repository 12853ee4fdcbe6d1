"""Relation vector composition from a pair of argument vectors."""

from __future__ import annotations

import numpy as np

BLOCKS = ("arg1", "arg2", "avg", "sub", "mul")


def compose(v1, v2) -> np.ndarray:
    """Concatenate [v1 | v2 | (v1+v2)/2 | v1-v2 | v1*v2] as float64.

    The difference block is signed, not absolute. Output length is 5 * dim.
    """
    a = np.asarray(v1, dtype=np.float64)
    b = np.asarray(v2, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"argument vectors must be 1-d and equal length, got {a.shape} and {b.shape}")
    return np.concatenate([a, b, (a + b) / 2.0, a - b, a * b])


def feature_dim(dim: int) -> int:
    return 5 * dim
