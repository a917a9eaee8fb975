"""Class-weighted cross-entropy losses.

Binary heads use sigmoid + binary cross-entropy, the 3-way head uses
softmax + categorical cross-entropy. Both come with the fused
gradient-with-respect-to-logits used during training.
"""

from __future__ import annotations

import numpy as np

PROB_EPS = 1e-7


def weighted_bce(p: float | np.ndarray, y: float | np.ndarray, weight: float | np.ndarray = 1.0):
    """-w(y) * [y ln p + (1-y) ln(1-p)] with p clamped to [eps, 1-eps]."""
    p = np.clip(np.asarray(p, dtype=float), PROB_EPS, 1.0 - PROB_EPS)
    y = np.asarray(y, dtype=float)
    loss = -(y * np.log(p) + (1.0 - y) * np.log1p(-p)) * weight
    return float(loss) if loss.ndim == 0 else loss


def weighted_cce(p: np.ndarray, y: int | np.ndarray, weight: float | np.ndarray = 1.0):
    """-w(y) * ln p[y] for a simplex vector (batched: rows are simplex)."""
    p = np.clip(np.asarray(p, dtype=float), PROB_EPS, 1.0)
    if p.ndim == 1:
        return float(-np.log(p[int(y)]) * weight)
    picked = p[np.arange(p.shape[0]), np.asarray(y, dtype=int)]
    return -np.log(picked) * weight


def bce_loss_and_dlogits(probs, y, sample_weights):
    """Mean weighted BCE over a batch plus dL/dlogits for a sigmoid head.

    probs: (B,) sigmoid outputs, y: (B,) 0/1, sample_weights: (B,).
    """
    n = probs.shape[0]
    loss = float(np.mean(weighted_bce(probs, y, sample_weights)))
    dlogits = sample_weights * (probs - y) / n
    return loss, dlogits


def cce_loss_and_dlogits(probs, y, sample_weights):
    """Mean weighted CCE over a batch plus dL/dlogits for a softmax head.

    probs: (B, K) softmax outputs, y: (B,) class indices.
    """
    n = probs.shape[0]
    loss = float(np.mean(weighted_cce(probs, y, sample_weights)))
    one_hot = np.zeros_like(probs)
    one_hot[np.arange(n), np.asarray(y, dtype=int)] = 1.0
    dlogits = sample_weights[:, None] * (probs - one_hot) / n
    return loss, dlogits
