"""Small MLP classifiers stored as flat float64 parameter vectors.

Layer ``l`` owns a weight matrix ``W{l}`` of shape (fan_in, fan_out) and a bias
``b{l}``; the last layer has a single logistic output unit. All tensors live
contiguously in one 1-D array so variation operators can treat a model as a
point in R^n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArchitectureMismatch, ConfigError, DatasetError

EPS = 1e-12

_ACTIVATIONS = ("relu", "tanh")


@dataclass(frozen=True)
class Architecture:
    input_dim: int
    hidden_dims: tuple[int, ...] = (16,)
    activation: str = "relu"

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        if int(self.input_dim) < 1:
            raise ConfigError(f"input_dim must be >= 1, got {self.input_dim}")
        if any(h < 1 for h in self.hidden_dims):
            raise ConfigError(f"hidden_dims must be positive, got {self.hidden_dims}")
        if self.activation not in _ACTIVATIONS:
            raise ConfigError(f"activation must be one of {_ACTIVATIONS}, got {self.activation!r}")

    @property
    def layer_sizes(self):
        return (self.input_dim, *self.hidden_dims, 1)

    @property
    def tensor_layout(self):
        """Ordered ``(name, shape, offset)`` triples covering the flat vector."""
        layout = []
        offset = 0
        sizes = self.layer_sizes
        for l, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            layout.append((f"W{l}", (fan_in, fan_out), offset))
            offset += fan_in * fan_out
            layout.append((f"b{l}", (fan_out,), offset))
            offset += fan_out
        return tuple(layout)

    @property
    def n_params(self):
        sizes = self.layer_sizes
        return sum(a * b + b for a, b in zip(sizes[:-1], sizes[1:]))

    def to_dict(self):
        return {
            "input_dim": self.input_dim,
            "hidden_dims": list(self.hidden_dims),
            "activation": self.activation,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["input_dim"]), tuple(d.get("hidden_dims", (16,))), d.get("activation", "relu"))


@dataclass(frozen=True, eq=False)
class ParamVector:
    """Flat parameters of one classifier. ``values`` is made read-only."""

    arch: Architecture
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if v.size != self.arch.n_params:
            raise ArchitectureMismatch(
                f"expected {self.arch.n_params} values for {self.arch}, got {v.size}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("parameter values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def tensor_layout(self):
        return self.arch.tensor_layout

    def tensors(self):
        """Views of each weight/bias tensor, in layout order."""
        out = []
        for name, shape, off in self.arch.tensor_layout:
            size = int(np.prod(shape))
            out.append((name, self.values[off : off + size].reshape(shape)))
        return out

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    batch_size: int = 32
    epochs_per_tune: int = 1
    seed: int = 0

    def __post_init__(self):
        # learning_rate == 0 is accepted: it is a convenient no-op for tests
        if self.learning_rate < 0 or self.batch_size < 1 or self.epochs_per_tune < 1:
            raise ConfigError(f"invalid TrainConfig {self}")


def init_params(arch: Architecture, seed: int) -> ParamVector:
    """Fan-in scaled normal weights, zero biases."""
    rng = np.random.default_rng(seed)
    values = np.zeros(arch.n_params)
    for name, shape, off in arch.tensor_layout:
        if name.startswith("W"):
            size = shape[0] * shape[1]
            values[off : off + size] = rng.standard_normal(size) / np.sqrt(shape[0])
    return ParamVector(arch, values)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _as_matrix(p, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = x.reshape(1, -1) if single else x
    if X.ndim != 2 or X.shape[1] != p.arch.input_dim:
        raise ArchitectureMismatch(
            f"expected feature dimension {p.arch.input_dim}, got shape {x.shape}"
        )
    return X, single


def _forward_cache(p, X):
    """Return the final logits and per-layer (input, preactivation) pairs."""
    tensors = [t for _, t in p.tensors()]
    n_layers = len(tensors) // 2
    act = np.tanh if p.arch.activation == "tanh" else (lambda a: np.maximum(a, 0.0))
    cache = []
    h = X
    for l in range(n_layers):
        W, b = tensors[2 * l], tensors[2 * l + 1]
        z = h @ W + b
        cache.append((h, z))
        h = act(z) if l < n_layers - 1 else z
    return h[:, 0], cache


def forward(p: ParamVector, x) -> np.ndarray | float:
    """P(Y=1 | x). Accepts one feature vector or a (rows, input_dim) matrix."""
    X, single = _as_matrix(p, x)
    logits, _ = _forward_cache(p, X)
    probs = _sigmoid(logits)
    return float(probs[0]) if single else probs


def predict(p: ParamVector, features) -> np.ndarray | int:
    """Hard labels; a probability of exactly 0.5 maps to class 1."""
    probs = forward(p, features)
    if np.isscalar(probs):
        return int(probs >= 0.5)
    return (probs >= 0.5).astype(np.int64)


def _check_batch(p, batch):
    X, y = batch
    X, _ = _as_matrix(p, X)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.shape[0] == 0:
        raise DatasetError("empty batch")
    if y.size != X.shape[0]:
        raise DatasetError(f"{X.shape[0]} feature rows but {y.size} labels")
    return X, y


def loss(p: ParamVector, batch) -> float:
    """Mean binary cross-entropy with probabilities clamped to [EPS, 1-EPS]."""
    X, y = _check_batch(p, batch)
    logits, _ = _forward_cache(p, X)
    probs = np.clip(_sigmoid(logits), EPS, 1.0 - EPS)
    return float(-np.mean(y * np.log(probs) + (1.0 - y) * np.log1p(-probs)))


def _grad_values(p, X, y):
    logits, cache = _forward_cache(p, X)
    probs = _sigmoid(logits)
    # the clamp is flat outside [EPS, 1-EPS], so those rows carry no gradient
    live = (probs >= EPS) & (probs <= 1.0 - EPS)
    delta = (np.where(live, probs - y, 0.0) / X.shape[0])[:, None]

    tensors = [t for _, t in p.tensors()]
    layout = p.arch.tensor_layout
    n_layers = len(tensors) // 2
    grad = np.empty(p.arch.n_params)
    for l in range(n_layers - 1, -1, -1):
        h_in, _ = cache[l]
        _, _, w_off = layout[2 * l]
        _, _, b_off = layout[2 * l + 1]
        gW = h_in.T @ delta
        grad[w_off : w_off + gW.size] = gW.reshape(-1)
        grad[b_off : b_off + delta.shape[1]] = delta.sum(axis=0)
        if l > 0:
            _, z_prev = cache[l - 1]
            back = delta @ tensors[2 * l].T
            if p.arch.activation == "tanh":
                delta = back * (1.0 - np.tanh(z_prev) ** 2)
            else:
                delta = back * (z_prev > 0)
    return grad


def gradient(p: ParamVector, batch) -> ParamVector:
    """Exact gradient of :func:`loss` with the same layout as ``p``."""
    X, y = _check_batch(p, batch)
    return ParamVector(p.arch, _grad_values(p, X, y))


def tune(p: ParamVector, train, cfg: TrainConfig) -> ParamVector:
    """Plain mini-batch SGD for ``cfg.epochs_per_tune`` epochs.

    ``train`` is a :class:`~fapareto.data.Dataset` or a ``(features, labels)``
    pair. The shuffle order depends only on ``cfg.seed``.
    """
    if hasattr(train, "features"):
        X, y = train.features, train.labels
    else:
        X, y = train
    X, y = _check_batch(p, (X, y))
    rng = np.random.default_rng(cfg.seed)
    w = p.values.copy()
    n = X.shape[0]
    for _ in range(cfg.epochs_per_tune):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            # index order inside a batch keeps the full-batch step bit-exact
            idx = np.sort(order[start : start + cfg.batch_size])
            cur = ParamVector(p.arch, w)
            w = w - cfg.learning_rate * _grad_values(cur, X[idx], y[idx])
    return ParamVector(p.arch, w)
