"""Single entry point for training any model kind, shared by the CLI and
grid-search so both build models the same way."""

from __future__ import annotations

from ..corpus import Dataset, task_items
from ..embeddings import DEFAULT_MAX_LEN, EmbeddingMatrix, init_random
from ..errors import ConfigError
from ..features import tokenize
from .base import MODEL_KINDS, FeatureSpec, TrainConfig
from .baseline import majority_baseline
from .bilstm import BILSTM_KINDS, train_bilstm
from .logreg import train_logreg

DEFAULT_EMBED_DIM = 32


def train_vocabulary(train: Dataset, task: str) -> list[str]:
    """Sorted token vocabulary of the task-restricted training texts."""
    vocab: set[str] = set()
    for post, _ in task_items(train, task):
        vocab.update(tokenize(post.text))
    return sorted(vocab)


def train_model(
    kind: str,
    train: Dataset,
    task: str,
    config: TrainConfig,
    features: FeatureSpec | None = None,
    emb: EmbeddingMatrix | None = None,
    embed_dim: int = DEFAULT_EMBED_DIM,
    max_len: int = DEFAULT_MAX_LEN,
):
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model kind {kind!r}, expected one of {MODEL_KINDS}")
    if kind == "majority_baseline":
        return majority_baseline(train, task, config)
    if kind == "logreg":
        if features is None:
            raise ConfigError("logreg requires a FeatureSpec (sentiment lexicon etc.)")
        return train_logreg(train, task, features, config)
    if kind in BILSTM_KINDS:
        if kind == "learned_bilstm":
            if emb is None:
                emb = init_random(train_vocabulary(train, task), embed_dim, config.seed)
        elif emb is None:
            raise ConfigError(f"{kind} requires a pretrained embedding matrix")
        return train_bilstm(kind, train, task, emb, config, features, max_len)
    raise ConfigError(f"unhandled model kind {kind!r}")
