"""Model checkpoints: a single .npz with a JSON metadata blob plus the
parameter arrays. Round-trips are value-identical (float64 preserved)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..embeddings import N_RESERVED, EmbeddingMatrix
from ..features import AuxExtractor, SentimentLexicon, TfIdfModel
from ..nn.layers import LstmParams
from .base import TrainConfig
from .baseline import MajorityModel
from .bilstm import BiLstmModel
from .logreg import LogRegModel


def _tfidf_meta(m: TfIdfModel) -> dict:
    grams = [""] * len(m.vocab)
    for gram, i in m.vocab.items():
        grams[i] = gram
    return {
        "ngrams": grams,
        "doc_freq": [m.doc_freq[g] for g in grams],
        "n_docs": m.n_docs,
        "n_range": list(m.n_range),
        "mode": m.mode,
    }


def _tfidf_from_meta(meta: dict) -> TfIdfModel:
    grams = meta["ngrams"]
    return TfIdfModel(
        vocab={g: i for i, g in enumerate(grams)},
        doc_freq=dict(zip(grams, meta["doc_freq"])),
        n_docs=meta["n_docs"],
        n_range=tuple(meta["n_range"]),
        mode=meta["mode"],
    )


def _extractor_meta(e: AuxExtractor | None) -> dict | None:
    if e is None:
        return None
    return {
        "tfidf": _tfidf_meta(e.tfidf),
        "lexicon": {"words": list(e.lexicon.scores), "scores": list(e.lexicon.scores.values())},
        "pos_tfidf": _tfidf_meta(e.pos_tfidf) if e.pos_tfidf is not None else None,
    }


def _extractor_from_meta(meta: dict | None) -> AuxExtractor | None:
    if meta is None:
        return None
    lex = SentimentLexicon(dict(zip(meta["lexicon"]["words"], meta["lexicon"]["scores"])))
    pos = _tfidf_from_meta(meta["pos_tfidf"]) if meta["pos_tfidf"] is not None else None
    return AuxExtractor(_tfidf_from_meta(meta["tfidf"]), lex, pos)


def _emb_tokens(emb: EmbeddingMatrix) -> list[str]:
    tokens = [""] * len(emb.vocab)
    for token, i in emb.vocab.items():
        tokens[i - N_RESERVED] = token
    return tokens


def save_model(model, path: str | Path) -> None:
    meta: dict = {
        "kind": model.kind,
        "task": model.task,
        "config": model.config.as_dict(),
    }
    arrays: dict[str, np.ndarray] = {}
    if isinstance(model, MajorityModel):
        meta["label"] = model.label
    elif isinstance(model, LogRegModel):
        meta["classes"] = list(model.classes)
        meta["extractor"] = _extractor_meta(model.extractor)
        meta["epoch_losses"] = model.epoch_losses
        arrays.update(W=model.W, b=model.b, mean=model.mean, std=model.std)
    elif isinstance(model, BiLstmModel):
        meta["classes"] = list(model.classes)
        meta["max_len"] = model.max_len
        meta["extractor"] = _extractor_meta(model.extractor)
        meta["epoch_losses"] = model.epoch_losses
        meta["emb_tokens"] = _emb_tokens(model.emb)
        meta["emb_trainable"] = model.emb.trainable
        arrays.update(
            emb_weights=model.emb.weights,
            fwd_W=model.fwd.W,
            fwd_U=model.fwd.U,
            fwd_b=model.fwd.b,
            bwd_W=model.bwd.W,
            bwd_U=model.bwd.U,
            bwd_b=model.bwd.b,
            W1=model.W1,
            b1=model.b1,
            W2=model.W2,
            b2=model.b2,
        )
    else:
        raise TypeError(f"cannot checkpoint model of type {type(model).__name__}")
    np.savez(path, __meta__=np.array(json.dumps(meta)), **arrays)


def load_model(path: str | Path):
    data = np.load(path, allow_pickle=False)
    meta = json.loads(str(data["__meta__"][()]))
    config = TrainConfig(**meta["config"])
    kind = meta["kind"]
    if kind == "majority_baseline":
        return MajorityModel(task=meta["task"], label=meta["label"], config=config)
    if kind == "logreg":
        return LogRegModel(
            task=meta["task"],
            classes=tuple(meta["classes"]),
            W=data["W"],
            b=data["b"],
            mean=data["mean"],
            std=data["std"],
            extractor=_extractor_from_meta(meta["extractor"]),
            config=config,
            epoch_losses=list(meta["epoch_losses"]),
        )
    if kind in ("learned_bilstm", "fast_bilstm", "aux_fast_bilstm"):
        emb = EmbeddingMatrix(
            vocab={t: i + N_RESERVED for i, t in enumerate(meta["emb_tokens"])},
            weights=data["emb_weights"],
            trainable=meta["emb_trainable"],
        )
        return BiLstmModel(
            kind=kind,
            task=meta["task"],
            classes=tuple(meta["classes"]),
            emb=emb,
            fwd=LstmParams(data["fwd_W"], data["fwd_U"], data["fwd_b"]),
            bwd=LstmParams(data["bwd_W"], data["bwd_U"], data["bwd_b"]),
            W1=data["W1"],
            b1=data["b1"],
            W2=data["W2"],
            b2=data["b2"],
            config=config,
            max_len=meta["max_len"],
            extractor=_extractor_from_meta(meta["extractor"]),
            epoch_losses=list(meta["epoch_losses"]),
        )
    raise ValueError(f"unknown model kind {kind!r} in checkpoint")
