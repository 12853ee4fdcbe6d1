"""One-hidden-layer binary classifier trained with AdaGrad.

Architecture: h = relu(W_h x + b_h), output = sigmoid(W_o h + b_o). All
arithmetic is float64. Regularization is inverted dropout on the input
feature vector (survivors scaled by 1/(1-p)), so evaluation never rescales.
The ReLU subgradient at exactly 0 is taken as 0.

Serialization (DRM1, little-endian): magic "DRM1", version u16, hidden u32,
in_dim u32, lr f64, dropout_p f64, eps f64, seed u64, then f64 parameter
blocks in fixed order: W_h, b_h, W_o, b_o, G_W_h, G_b_h, G_W_o, G_b_o.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

LOSS_EPS = 1e-12
MODEL_MAGIC = b"DRM1"
MODEL_FORMAT_VERSION = 1

_MODEL_HEADER = struct.Struct("<HIIdddQ")


class ModelFormatError(Exception):
    """Serialized model bytes violate the DRM1 contract."""


class DivergenceError(RuntimeError):
    """A parameter or gradient became NaN/Inf; the run must abort."""


@dataclass
class TrainExample:
    """One training instance: a composed relation vector and a binary label."""

    feature: np.ndarray
    label: float


@dataclass
class Gradients:
    """Loss gradients, same shapes as the trainable parameters."""

    W_h: np.ndarray
    b_h: np.ndarray
    W_o: np.ndarray
    b_o: float


def _sigmoid(z):
    """Numerically stable logistic function over an ndarray."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def bce_loss(p: float, y: float) -> float:
    """Binary cross entropy with p clamped to [1e-12, 1 - 1e-12]."""
    p = min(max(float(p), LOSS_EPS), 1.0 - LOSS_EPS)
    y = float(y)
    return float(-(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


class MlpClassifier:
    """Binary MLP with its AdaGrad state.

    A classifier is confined to one execution context while training;
    once training stops it is treated as frozen and is safe to share for
    concurrent prediction.
    """

    def __init__(
        self,
        in_dim: int,
        hidden: int = 100,
        lr: float = 0.01,
        dropout_p: float = 0.3,
        eps: float = 1e-8,
        seed: int = 0,
        rng: np.random.Generator | None = None,
    ):
        if in_dim <= 0:
            raise ValueError("in_dim must be positive")
        if not 0.0 <= dropout_p < 1.0:
            raise ValueError("dropout_p must be in [0, 1)")
        self.in_dim = int(in_dim)
        self.hidden = int(hidden)
        self.lr = float(lr)
        self.dropout_p = float(dropout_p)
        self.eps = float(eps)
        self.seed = int(seed)
        if rng is None:
            rng = np.random.default_rng(self.seed)
        # Uniform Glorot on weights, zero biases.
        limit_h = np.sqrt(6.0 / (self.in_dim + self.hidden))
        self.W_h = rng.uniform(-limit_h, limit_h, size=(self.hidden, self.in_dim))
        self.b_h = np.zeros(self.hidden)
        limit_o = np.sqrt(6.0 / (self.hidden + 1))
        self.W_o = rng.uniform(-limit_o, limit_o, size=self.hidden)
        self.b_o = 0.0
        self.G_W_h = np.zeros_like(self.W_h)
        self.G_b_h = np.zeros_like(self.b_h)
        self.G_W_o = np.zeros_like(self.W_o)
        self.G_b_o = 0.0

    # -- forward -----------------------------------------------------------

    def forward(self, x, rng: np.random.Generator | None = None) -> float:
        """Output probability for one feature vector.

        Passing rng selects training mode: inverted dropout is applied to x.
        Without rng (or with dropout_p = 0) the pass is deterministic and
        depends only on parameters and input.
        """
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.in_dim,):
            raise ValueError(f"input has shape {x.shape}, model expects ({self.in_dim},)")
        if rng is not None and self.dropout_p > 0.0:
            mask = rng.random(self.in_dim) >= self.dropout_p
            x = x * mask / (1.0 - self.dropout_p)
        h = np.maximum(self.W_h @ x + self.b_h, 0.0)
        z = self.W_o @ h + self.b_o
        return float(_sigmoid(np.array([z]))[0])

    def eval_probabilities(self, X) -> np.ndarray:
        """Eval-mode probabilities for a (n, in_dim) batch."""
        X = np.asarray(X, dtype=np.float64)
        H = np.maximum(X @ self.W_h.T + self.b_h, 0.0)
        return _sigmoid(H @ self.W_o + self.b_o)

    def predict(self, x) -> int:
        """Hard label at threshold 0.5; ties go positive."""
        return int(self.forward(x) >= 0.5)

    def predict_many(self, X) -> np.ndarray:
        return (self.eval_probabilities(X) >= 0.5).astype(np.int64)

    # -- gradients and updates ----------------------------------------------

    def backward(self, batch, rng: np.random.Generator | None = None) -> Gradients:
        """Exact mean gradient of the cross-entropy loss over a batch.

        Dropout masks (one per example) are drawn here exactly as the paired
        training forward pass draws them; with dropout_p > 0 an rng is
        required. The gradient ignores the loss clamp, which only binds when
        |logit| > ~27.6.
        """
        if len(batch) == 0:
            raise ValueError("batch must be non-empty")
        X = np.stack([np.asarray(ex.feature, dtype=np.float64) for ex in batch])
        y = np.array([ex.label for ex in batch], dtype=np.float64)
        if X.shape[1] != self.in_dim:
            raise ValueError(f"batch features have width {X.shape[1]}, model expects {self.in_dim}")
        if self.dropout_p > 0.0:
            if rng is None:
                raise ValueError("dropout_p > 0 requires an rng for the dropout masks")
            mask = rng.random(X.shape) >= self.dropout_p
            X = X * mask / (1.0 - self.dropout_p)
        Z = X @ self.W_h.T + self.b_h
        H = np.maximum(Z, 0.0)
        p = _sigmoid(H @ self.W_o + self.b_o)
        dz = (p - y) / len(batch)  # d(mean loss)/d(output logit)
        gW_o = H.T @ dz
        gb_o = float(dz.sum())
        dH = np.outer(dz, self.W_o) * (Z > 0.0)
        gW_h = dH.T @ X
        gb_h = dH.sum(axis=0)
        return Gradients(W_h=gW_h, b_h=gb_h, W_o=gW_o, b_o=gb_o)

    def adagrad_step(self, grads: Gradients) -> None:
        """Per component: G += g^2, then theta -= lr * g / (sqrt(G) + eps)."""
        for g in (grads.W_h, grads.b_h, grads.W_o):
            if not np.all(np.isfinite(g)):
                raise DivergenceError("non-finite gradient")
        if not np.isfinite(grads.b_o):
            raise DivergenceError("non-finite gradient")
        self.G_W_h += grads.W_h**2
        self.G_b_h += grads.b_h**2
        self.G_W_o += grads.W_o**2
        self.G_b_o += grads.b_o**2
        # Zero gradient on a never-updated component leaves sqrt(G)+eps at 0
        # when eps = 0; the step is 0 there by definition, so guard the division.
        for theta, g, G in (
            (self.W_h, grads.W_h, self.G_W_h),
            (self.b_h, grads.b_h, self.G_b_h),
            (self.W_o, grads.W_o, self.G_W_o),
        ):
            denom = np.sqrt(G) + self.eps
            theta -= np.divide(self.lr * g, denom, out=np.zeros_like(g), where=denom > 0.0)
        denom_o = np.sqrt(self.G_b_o) + self.eps
        if denom_o > 0.0:
            self.b_o -= self.lr * grads.b_o / denom_o
        if not (
            np.all(np.isfinite(self.W_h))
            and np.all(np.isfinite(self.b_h))
            and np.all(np.isfinite(self.W_o))
            and np.isfinite(self.b_o)
        ):
            raise DivergenceError("non-finite parameter after update")

    # -- lifecycle -----------------------------------------------------------

    def copy(self) -> "MlpClassifier":
        dup = object.__new__(MlpClassifier)
        dup.in_dim = self.in_dim
        dup.hidden = self.hidden
        dup.lr = self.lr
        dup.dropout_p = self.dropout_p
        dup.eps = self.eps
        dup.seed = self.seed
        dup.W_h = self.W_h.copy()
        dup.b_h = self.b_h.copy()
        dup.W_o = self.W_o.copy()
        dup.b_o = self.b_o
        dup.G_W_h = self.G_W_h.copy()
        dup.G_b_h = self.G_b_h.copy()
        dup.G_W_o = self.G_W_o.copy()
        dup.G_b_o = self.G_b_o
        return dup

    def save(self) -> bytes:
        """Deterministic DRM1 bytes; saving twice yields identical output."""
        head = MODEL_MAGIC + _MODEL_HEADER.pack(
            MODEL_FORMAT_VERSION,
            self.hidden,
            self.in_dim,
            self.lr,
            self.dropout_p,
            self.eps,
            self.seed & 0xFFFFFFFFFFFFFFFF,
        )
        blocks = (
            self.W_h,
            self.b_h,
            self.W_o,
            np.array([self.b_o]),
            self.G_W_h,
            self.G_b_h,
            self.G_W_o,
            np.array([self.G_b_o]),
        )
        return head + b"".join(np.ascontiguousarray(b, dtype="<f8").tobytes() for b in blocks)


def load_model(data: bytes) -> MlpClassifier:
    """Parse DRM1 bytes; round-trips parameters, accumulators and hypers bit-exactly."""
    if len(data) < 4 + _MODEL_HEADER.size:
        raise ModelFormatError("truncated header")
    if data[:4] != MODEL_MAGIC:
        raise ModelFormatError(f"bad magic {data[:4]!r}")
    version, hidden, in_dim, lr, dropout_p, eps, seed = _MODEL_HEADER.unpack_from(data, 4)
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {version}")
    if hidden == 0 or in_dim == 0:
        raise ModelFormatError("zero-sized layer in header")
    counts = (hidden * in_dim, hidden, hidden, 1, hidden * in_dim, hidden, hidden, 1)
    expected = 4 + _MODEL_HEADER.size + 8 * sum(counts)
    if len(data) < expected:
        raise ModelFormatError("truncated parameter blocks")
    if len(data) > expected:
        raise ModelFormatError(f"{len(data) - expected} trailing bytes")
    offset = 4 + _MODEL_HEADER.size
    blocks = []
    for count in counts:
        blocks.append(np.frombuffer(data, dtype="<f8", count=count, offset=offset).copy())
        offset += 8 * count
    model = object.__new__(MlpClassifier)
    model.in_dim = in_dim
    model.hidden = hidden
    model.lr = lr
    model.dropout_p = dropout_p
    model.eps = eps
    model.seed = seed
    model.W_h = blocks[0].reshape(hidden, in_dim)
    model.b_h = blocks[1]
    model.W_o = blocks[2]
    model.b_o = float(blocks[3][0])
    model.G_W_h = blocks[4].reshape(hidden, in_dim)
    model.G_b_h = blocks[5]
    model.G_W_o = blocks[6]
    model.G_b_o = float(blocks[7][0])
    return model
