"""NT-Xent (normalized temperature-scaled cross-entropy) with gradients."""

import numpy as np

from ..errors import ConfigError, DegenerateVector, ShapeError


def nt_xent_loss(za, zb, temperature=0.5):
    """Contrastive loss over the 2B views of a batch of positive pairs.

    Row ``i`` of ``za`` and row ``i`` of ``zb`` are positives; every other
    view in the batch is a negative. Returns ``(loss, (dza, dzb))``.
    """
    za = np.asarray(za, dtype=np.float64)
    zb = np.asarray(zb, dtype=np.float64)
    if za.shape != zb.shape or za.ndim != 2:
        raise ShapeError(f"embedding batches must share a 2-D shape, got {za.shape} and {zb.shape}")
    B = za.shape[0]
    if B < 2:
        raise ConfigError("NT-Xent needs a batch of at least 2 pairs")
    if temperature <= 0:
        raise ConfigError("temperature must be positive")
    z = np.concatenate([za, zb])
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise DegenerateVector("zero embedding vector")
    u = z / norms
    s = (u @ u.T) / temperature
    np.fill_diagonal(s, -np.inf)
    pos = np.concatenate([np.arange(B, 2 * B), np.arange(B)])
    rows = np.arange(2 * B)
    m = s.max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp(s - m).sum(axis=1))
    loss = float(np.mean(lse - s[rows, pos]))

    p = np.exp(s - lse[:, None])
    p[rows, pos] -= 1.0
    ds = p / (2 * B)
    du = (ds + ds.T) @ u / temperature
    dz = (du - u * np.sum(du * u, axis=1, keepdims=True)) / norms
    return loss, (dz[:B], dz[B:])
