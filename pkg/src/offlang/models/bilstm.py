"""The three BiLSTM classifier variants.

* learned_bilstm: trainable randomly initialized embeddings
* fast_bilstm: frozen pretrained embeddings
* aux_fast_bilstm: fast_bilstm plus auxiliary features joined after the
  BiLSTM output, before the hidden layer

Architecture: embedding -> BiLSTM (20 forward + 20 backward, concatenated)
-> [aux concat] -> dense 16 ReLU -> sigmoid (2-class tasks) or softmax
(3-class task), dropout between all layers during training.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..corpus import TASK_CLASSES, Dataset, Post, task_items
from ..embeddings import DEFAULT_MAX_LEN, PAD_INDEX, EmbeddingMatrix, encode_batch
from ..errors import ConfigError, InsufficientDataError
from ..features import AuxExtractor, TokenList, tokenize
from ..nn.layers import (
    LstmParams,
    bilstm_backward,
    bilstm_forward,
    dense_backward,
    dense_forward,
    dropout_backward,
    dropout_forward,
    sigmoid,
    softmax,
)
from ..nn.losses import bce_loss_and_dlogits, cce_loss_and_dlogits
from .base import FeatureSpec, TrainConfig, sample_weights

BILSTM_KINDS = ("learned_bilstm", "fast_bilstm", "aux_fast_bilstm")
HIDDEN_SIZE = 20
DENSE_UNITS = 16
PREDICT_BATCH = 256


@dataclass
class BiLstmModel:
    kind: str
    task: str
    classes: tuple[str, ...]
    emb: EmbeddingMatrix
    fwd: LstmParams
    bwd: LstmParams
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    config: TrainConfig
    max_len: int = DEFAULT_MAX_LEN
    extractor: AuxExtractor | None = None
    # z-score statistics of the aux block, fitted on the training set;
    # raw channels differ by orders of magnitude and would kill the ReLUs
    aux_mean: np.ndarray | None = None
    aux_std: np.ndarray | None = None
    epoch_losses: list[float] = field(default_factory=list)

    def parameters(self) -> dict[str, np.ndarray]:
        params = {
            "fwd.W": self.fwd.W,
            "fwd.U": self.fwd.U,
            "fwd.b": self.fwd.b,
            "bwd.W": self.bwd.W,
            "bwd.U": self.bwd.U,
            "bwd.b": self.bwd.b,
            "W1": self.W1,
            "b1": self.b1,
            "W2": self.W2,
            "b2": self.b2,
        }
        if self.emb.trainable:
            params["emb"] = self.emb.weights
        return params

    @property
    def binary(self) -> bool:
        return len(self.classes) == 2

    def _forward(self, idx, lengths, aux, training=False, rng=None):
        E = self.emb.weights[idx]  # (B, T, D)
        rate = self.config.dropout
        E, mask_e = dropout_forward(E, rate, training, rng)
        hcat, bicache = bilstm_forward(self.fwd, self.bwd, E, lengths)
        hcat, mask_h = dropout_forward(hcat, rate, training, rng)
        if self.extractor is not None:
            z = np.concatenate([hcat, aux], axis=1)
        else:
            z = hcat
        h1, cache1 = dense_forward(z, self.W1, self.b1, "relu")
        h1, mask_1 = dropout_forward(h1, rate, training, rng)
        logits, cache2 = dense_forward(h1, self.W2, self.b2, "identity")
        if self.binary:
            probs = sigmoid(logits[:, 0])
        else:
            probs = softmax(logits)
        caches = (idx, mask_e, bicache, mask_h, cache1, mask_1, cache2)
        return probs, caches

    def _backward(self, dlogits, caches):
        idx, mask_e, bicache, mask_h, cache1, mask_1, cache2 = caches
        dh1, dW2, db2 = dense_backward(dlogits, cache2)
        dh1 = dropout_backward(dh1, mask_1)
        dz, dW1, db1 = dense_backward(dh1, cache1)
        dhcat = dz[:, : 2 * self.fwd.hidden_size]
        dhcat = dropout_backward(dhcat, mask_h)
        dE, lstm_grads = bilstm_backward(dhcat, bicache)
        dE = dropout_backward(dE, mask_e)
        grads = {"W1": dW1, "b1": db1, "W2": dW2, "b2": db2, **lstm_grads}
        if self.emb.trainable:
            demb = np.zeros_like(self.emb.weights)
            np.add.at(demb, idx.reshape(-1), dE.reshape(-1, dE.shape[-1]))
            demb[PAD_INDEX] = 0.0  # padding vector is never updated
            grads["emb"] = demb
        return grads

    def loss_and_grads(self, idx, lengths, aux, y, sw, training=False, rng=None):
        """Mean class-weighted loss over a batch and gradients for every
        trainable parameter; used by both the trainer and gradient checks."""
        probs, caches = self._forward(idx, lengths, aux, training, rng)
        if self.binary:
            loss, dlog = bce_loss_and_dlogits(probs, y.astype(float), sw)
            dlogits = dlog[:, None]
        else:
            loss, dlogits = cce_loss_and_dlogits(probs, y, sw)
        return loss, self._backward(dlogits, caches)

    def _encode_texts(self, texts: Sequence[str]):
        docs = [tokenize(t) for t in texts]
        idx, lengths = encode_batch(self.emb, docs, self.max_len)
        aux = None
        if self.extractor is not None:
            aux = self.extractor.transform_matrix(list(texts))
        return idx, lengths, aux

    def predict_scores(self, texts: Sequence[str]) -> np.ndarray:
        """Class probability matrix (N, K); inference mode, no dropout."""
        out = []
        for start in range(0, len(texts), PREDICT_BATCH):
            chunk = list(texts[start : start + PREDICT_BATCH])
            idx, lengths, aux = self._encode_texts(chunk)
            probs, _ = self._forward(idx, lengths, aux, training=False)
            if self.binary:
                out.append(np.column_stack([1.0 - probs, probs]))
            else:
                out.append(probs)
        return np.concatenate(out) if out else np.zeros((0, len(self.classes)))

    def predict(self, posts: Sequence[Post]) -> list[str]:
        if not posts:
            return []
        scores = self.predict_scores([p.text for p in posts])
        if self.binary:
            return [self.classes[1] if p >= 0.5 else self.classes[0] for p in scores[:, 1]]
        return [self.classes[i] for i in np.argmax(scores, axis=1)]


def new_bilstm_model(
    kind: str,
    task: str,
    emb: EmbeddingMatrix,
    config: TrainConfig,
    extractor: AuxExtractor | None = None,
    max_len: int = DEFAULT_MAX_LEN,
    hidden_size: int = HIDDEN_SIZE,
    dense_units: int = DENSE_UNITS,
) -> BiLstmModel:
    """Freshly initialized model with the trainability contract enforced."""
    if kind not in BILSTM_KINDS:
        raise ConfigError(f"unknown BiLSTM kind {kind!r}")
    if kind == "learned_bilstm" and not emb.trainable:
        raise ConfigError("learned_bilstm requires a trainable embedding matrix")
    if kind in ("fast_bilstm", "aux_fast_bilstm") and emb.trainable:
        raise ConfigError(f"{kind} requires a frozen pretrained embedding matrix")
    if kind == "aux_fast_bilstm" and extractor is None:
        raise ConfigError("aux_fast_bilstm requires a fitted auxiliary feature extractor")
    if kind != "aux_fast_bilstm" and extractor is not None:
        raise ConfigError(f"{kind} does not accept auxiliary features")

    classes = TASK_CLASSES[task]
    out_units = 1 if len(classes) == 2 else len(classes)
    aux_dim = extractor.dim if extractor is not None else 0
    rng = np.random.default_rng(config.seed)
    fwd = LstmParams.init(emb.dim, hidden_size, rng)
    bwd = LstmParams.init(emb.dim, hidden_size, rng)
    init = lambda shape: rng.uniform(-0.05, 0.05, shape)
    return BiLstmModel(
        kind=kind,
        task=task,
        classes=classes,
        emb=emb,
        fwd=fwd,
        bwd=bwd,
        W1=init((dense_units, 2 * hidden_size + aux_dim)),
        b1=np.zeros(dense_units),
        W2=init((out_units, dense_units)),
        b2=np.zeros(out_units),
        config=config,
        max_len=max_len,
        extractor=extractor,
    )


def train_bilstm(
    kind: str,
    train: Dataset,
    task: str,
    emb: EmbeddingMatrix,
    config: TrainConfig,
    features: FeatureSpec | None = None,
    max_len: int = DEFAULT_MAX_LEN,
    hidden_size: int = HIDDEN_SIZE,
    dense_units: int = DENSE_UNITS,
) -> BiLstmModel:
    """Mini-batch Adam training with per-epoch shuffling and class-weighted
    loss. Fully deterministic for a fixed seed and platform."""
    items = task_items(train, task)
    if not items:
        raise InsufficientDataError(f"no training samples for task {task}")
    texts = [post.text for post, _ in items]
    labels = [label for _, label in items]
    classes = TASK_CLASSES[task]

    extractor = None
    aux = None
    pos_aligned: list[TokenList] | None = None
    if kind == "aux_fast_bilstm":
        if features is None:
            raise ConfigError("aux_fast_bilstm requires a FeatureSpec")
        pos_docs = None
        if features.pos_tags is not None:
            pos_aligned = [features.pos_tags.get(post.id, []) for post, _ in items]
            pos_docs = pos_aligned
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

    model = new_bilstm_model(
        kind, task, emb, config, extractor, max_len, hidden_size, dense_units
    )

    docs = [tokenize(t) for t in texts]
    idx, lengths = encode_batch(emb, docs, max_len)
    if extractor is not None:
        aux = extractor.transform_matrix(texts, pos_aligned)
    y = np.array([classes.index(l) for l in labels])
    sw, _ = sample_weights(labels, classes, config.class_weights)

    from ..nn.optim import AdamState, adam_update

    params = model.parameters()
    state = AdamState.for_params(params)
    rng = np.random.default_rng(config.seed)
    n = len(labels)
    for _ in range(config.epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            batch = perm[start : start + config.batch_size]
            aux_b = aux[batch] if aux is not None else None
            loss, grads = model.loss_and_grads(
                idx[batch], lengths[batch], aux_b, y[batch], sw[batch], training=True, rng=rng
            )
            adam_update(params, grads, state, config.lr)
            epoch_loss += loss * len(batch)
        model.epoch_losses.append(epoch_loss / n)
    return model
