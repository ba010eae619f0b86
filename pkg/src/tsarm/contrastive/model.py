"""Multilayer perceptron encoder and linear head with hand-written backprop."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError


@dataclass
class EncoderConfig:
    hidden_sizes: list = field(default_factory=lambda: [64, 64])
    embedding_dim: int = 32
    activation: str = "relu"
    seed: int = 0

    def __post_init__(self):
        if self.embedding_dim < 2:
            raise ConfigError("embedding_dim must be at least 2")
        if self.activation not in ("relu", "tanh"):
            raise ConfigError(f"activation must be relu or tanh, got {self.activation!r}")
        if any(int(h) < 1 for h in self.hidden_sizes):
            raise ConfigError("hidden sizes must be positive")
        self.hidden_sizes = [int(h) for h in self.hidden_sizes]


def _act(z, kind):
    return np.maximum(z, 0.0) if kind == "relu" else np.tanh(z)


def _act_grad(z, a, kind):
    return (z > 0.0).astype(z.dtype) if kind == "relu" else 1.0 - a * a


class MLP:
    """Fully connected network; the last layer is linear.

    ``params`` is a flat list ``[W0, b0, W1, b1, ...]`` with ``W`` of shape
    ``(fan_in, fan_out)`` so a batch ``X`` maps as ``X @ W + b``.
    """

    def __init__(self, sizes, activation="relu", rng=None):
        if len(sizes) < 2:
            raise ConfigError("an MLP needs at least input and output sizes")
        rng = np.random.default_rng(0) if rng is None else rng
        self.sizes = [int(s) for s in sizes]
        self.activation = activation
        self.params = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            gain = 2.0 if activation == "relu" else 1.0
            self.params.append(rng.normal(0.0, np.sqrt(gain / fan_in), (fan_in, fan_out)))
            self.params.append(np.zeros(fan_out))

    @classmethod
    def encoder(cls, input_len, cfg):
        rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), 0x0E4C]))
        return cls([input_len, *cfg.hidden_sizes, cfg.embedding_dim], cfg.activation, rng)

    @property
    def n_layers(self):
        return len(self.params) // 2

    def forward(self, X):
        """Return ``(output, cache)``; the cache feeds ``backward``."""
        a = np.asarray(X, dtype=np.float64)
        cache = [a]
        for i in range(self.n_layers):
            W, b = self.params[2 * i], self.params[2 * i + 1]
            z = a @ W + b
            if i < self.n_layers - 1:
                a = _act(z, self.activation)
                cache.append((z, a))
            else:
                a = z
        return a, cache

    def __call__(self, X):
        return self.forward(X)[0]

    def backward(self, cache, dout):
        """Gradients of the loss w.r.t. ``params`` (same order) and the input."""
        grads = [None] * len(self.params)
        d = dout
        for i in range(self.n_layers - 1, -1, -1):
            a_in = cache[0] if i == 0 else cache[i][1]
            W = self.params[2 * i]
            grads[2 * i] = a_in.T @ d
            grads[2 * i + 1] = d.sum(axis=0)
            d = d @ W.T
            if i > 0:
                z, a = cache[i]
                d = d * _act_grad(z, a, self.activation)
        return grads, d

    def sgd_step(self, grads, lr):
        for p, g in zip(self.params, grads):
            p -= lr * g

    def copy(self):
        other = MLP.__new__(MLP)
        other.sizes = list(self.sizes)
        other.activation = self.activation
        other.params = [p.copy() for p in self.params]
        return other

    def flat(self):
        return np.concatenate([p.ravel() for p in self.params])

    def set_flat(self, theta):
        i = 0
        for p in self.params:
            p[...] = theta[i:i + p.size].reshape(p.shape)
            i += p.size


def softmax_cross_entropy(logits, y):
    """Mean cross-entropy and its gradient w.r.t. ``logits``."""
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    n = logits.shape[0]
    loss = -float(logp[np.arange(n), y].mean())
    d = np.exp(logp)
    d[np.arange(n), y] -= 1.0
    return loss, d / n
