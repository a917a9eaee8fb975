"""One-vs-rest logistic regression on the auxiliary feature vector.

Trained by full-batch gradient descent with an L2 penalty and class
weights. Features are z-scored with statistics fitted on the training set
so one learning rate works across channels of very different magnitude
(TF-IDF weights vs character counts).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..corpus import TASK_CLASSES, Dataset, Post, task_items
from ..errors import InsufficientDataError
from ..features import AuxExtractor, TokenList
from ..nn.layers import sigmoid
from ..nn.losses import weighted_bce
from .base import FeatureSpec, TrainConfig, sample_weights

L2_PENALTY = 0.01
MAX_ITER = 2000
GRAD_TOL = 1e-6
STD_FLOOR = 1e-8


@dataclass
class LogRegModel:
    task: str
    classes: tuple[str, ...]
    W: np.ndarray  # (K, D)
    b: np.ndarray  # (K,)
    mean: np.ndarray
    std: np.ndarray
    extractor: AuxExtractor
    config: TrainConfig
    epoch_losses: list[float] = field(default_factory=list)
    kind: str = "logreg"

    def _features(self, texts: Sequence[str], pos_tags=None) -> np.ndarray:
        X = self.extractor.transform_matrix(list(texts), pos_tags)
        return (X - self.mean) / self.std

    def predict_scores(self, texts: Sequence[str], pos_tags=None) -> np.ndarray:
        """Per-class sigmoid scores of the one-vs-rest heads, (N, K)."""
        X = self._features(texts, pos_tags)
        return sigmoid(X @ self.W.T + self.b)

    def predict(self, posts: Sequence[Post], pos_tags=None) -> list[str]:
        if not posts:
            return []
        scores = self.predict_scores([p.text for p in posts], pos_tags)
        return [self.classes[i] for i in np.argmax(scores, axis=1)]


def train_logreg(
    train: Dataset,
    task: str,
    features: FeatureSpec,
    config: TrainConfig,
    l2: float = L2_PENALTY,
    max_iter: int = MAX_ITER,
    grad_tol: float = GRAD_TOL,
    class_weight_override: dict[str, float] | None = None,
) -> LogRegModel:
    """Fit one sigmoid head per class on the training set restricted to the
    task. Deterministic: parameters start at zero, so the seed only tags
    the run."""
    items = task_items(train, task)
    if not items:
        raise InsufficientDataError(f"no training samples for task {task}")
    texts = [post.text for post, _ in items]
    labels = [label for _, label in items]
    if len(set(labels)) < 2:
        raise InsufficientDataError(f"task {task} training set contains a single class")
    classes = TASK_CLASSES[task]

    pos_docs = None
    pos_tags_aligned: list[TokenList] | None = None
    if features.pos_tags is not None:
        pos_tags_aligned = [features.pos_tags.get(post.id, []) for post, _ in items]
        pos_docs = pos_tags_aligned
    extractor = AuxExtractor.fit(
        texts,
        features.lexicon,
        n_range=features.n_range,
        mode=features.mode,
        min_df=features.min_df,
        pos_docs=pos_docs,
        pos_n_range=features.pos_n_range,
        pos_min_df=features.pos_min_df,
    )
    X = extractor.transform_matrix(texts, pos_tags_aligned)
    mean = X.mean(axis=0)
    std = np.maximum(X.std(axis=0), STD_FLOOR)
    Xs = (X - mean) / std

    if class_weight_override is not None:
        sw = np.array([class_weight_override[label] for label in labels])
    else:
        sw, _ = sample_weights(labels, classes, config.class_weights)
    Y = np.stack([np.array([1.0 if l == c else 0.0 for l in labels]) for c in classes])
    n = len(labels)
    K = len(classes)
    W = np.zeros((K, Xs.shape[1]))
    b = np.zeros(K)

    history: list[float] = []
    for it in range(max_iter):
        Z = Xs @ W.T + b  # (n, K)
        P = sigmoid(Z)
        R = sw[:, None] * (P - Y.T)  # (n, K)
        grad_W = R.T @ Xs / n + l2 * W
        grad_b = R.sum(axis=0) / n
        gnorm = np.sqrt(np.sum(grad_W**2) + np.sum(grad_b**2))
        if it % 100 == 0 or gnorm < grad_tol:
            loss = float(
                np.mean([np.mean(weighted_bce(P[:, k], Y[k], sw)) for k in range(K)])
                + l2 / 2.0 * np.sum(W**2)
            )
            history.append(loss)
        if gnorm < grad_tol:
            break
        W -= config.lr * grad_W
        b -= config.lr * grad_b

    return LogRegModel(
        task=task,
        classes=classes,
        W=W,
        b=b,
        mean=mean,
        std=std,
        extractor=extractor,
        config=config,
        epoch_losses=history,
    )
