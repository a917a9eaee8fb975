"""Shared training configuration and class-weight computation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from ..corpus import TASK_CLASSES, LabelDistribution
from ..errors import ConfigError
from ..features import SentimentLexicon, TokenList

MODEL_KINDS = (
    "majority_baseline",
    "logreg",
    "learned_bilstm",
    "fast_bilstm",
    "aux_fast_bilstm",
)

CLASS_WEIGHT_MODES = ("inverse_count", "none")


@dataclass
class TrainConfig:
    batch_size: int = 128
    lr: float = 0.001
    dropout: float = 0.2
    epochs: int = 10
    seed: int = 0
    class_weights: str = "inverse_count"

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.class_weights not in CLASS_WEIGHT_MODES:
            raise ConfigError(f"class_weights must be one of {CLASS_WEIGHT_MODES}")

    def with_overrides(self, **kwargs) -> "TrainConfig":
        return replace(self, **kwargs)

    def as_dict(self) -> dict:
        return {
            "batch_size": self.batch_size,
            "lr": self.lr,
            "dropout": self.dropout,
            "epochs": self.epochs,
            "seed": self.seed,
            "class_weights": self.class_weights,
        }


@dataclass
class FeatureSpec:
    """How to fit the auxiliary feature extractor on a training corpus."""

    lexicon: SentimentLexicon
    n_range: tuple[int, int] = (1, 3)
    mode: str = "word"
    min_df: int = 1
    pos_tags: Mapping[str, TokenList] | None = None  # post id -> tag sequence
    pos_n_range: tuple[int, int] = (1, 3)
    pos_min_df: int = 1


def weights_for_counts(counts: Mapping[str, int], classes: Sequence[str]) -> dict[str, float]:
    """w_c = N / (K * n_c): scaled inverse frequency, ratios equal to the
    plain inverse of the class counts."""
    total = sum(counts.get(c, 0) for c in classes)
    k = len(classes)
    weights = {}
    for c in classes:
        n = counts.get(c, 0)
        if n <= 0:
            raise ValueError(f"class {c!r} has no training samples, cannot weight by inverse count")
        weights[c] = total / (k * n)
    return weights


def class_weights_from(dist: LabelDistribution, task: str) -> dict[str, float]:
    """Inverse-count class weights for one task from a label distribution."""
    classes = TASK_CLASSES[task]
    counts = {c: 0 for c in classes}
    for (a, b, c), n in dist.counts.items():
        level = {"A": a, "B": b, "C": c}[task]
        if level is not None:
            counts[level] += n
    return weights_for_counts(counts, classes)


def sample_weights(
    labels: Sequence[str], classes: Sequence[str], mode: str
) -> tuple[np.ndarray, dict[str, float]]:
    """Per-sample loss weights from the gold class of each sample."""
    if mode == "none":
        return np.ones(len(labels)), {c: 1.0 for c in classes}
    counts = {c: 0 for c in classes}
    for label in labels:
        counts[label] += 1
    weights = weights_for_counts(counts, classes)
    return np.array([weights[label] for label in labels]), weights
