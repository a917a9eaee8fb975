"""Vocabulary-indexed embedding matrices.

Row 0 is the padding vector (all zeros, never updated), row 1 the
unknown-token vector; real vocabulary entries start at row 2. Matrices are
either trainable (random uniform init) or frozen (loaded from a text .vec
file, unknown = mean of all loaded vectors).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ParseError
from .features import TokenList

PAD_INDEX = 0
UNK_INDEX = 1
N_RESERVED = 2

INIT_RANGE = 0.05
DEFAULT_MAX_LEN = 100


@dataclass
class EmbeddingMatrix:
    vocab: dict[str, int]
    weights: np.ndarray  # (len(vocab) + 2, dim), float64
    trainable: bool

    def __post_init__(self):
        if self.weights.shape[0] != len(self.vocab) + N_RESERVED:
            raise ValueError("weight matrix must have one row per token plus PAD and UNK")
        if np.any(self.weights[PAD_INDEX] != 0.0):
            raise ValueError("PAD row must stay all zeros")

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def index(self, token: str) -> int:
        return self.vocab.get(token, UNK_INDEX)

    def lookup(self, token: str) -> np.ndarray:
        return self.weights[self.index(token)]

    def checksum(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.weights).tobytes()).hexdigest()

    def save(self, path: str | Path) -> None:
        tokens = [""] * len(self.vocab)
        for token, idx in self.vocab.items():
            tokens[idx - N_RESERVED] = token
        np.savez(
            path,
            weights=self.weights,
            tokens=np.array(tokens, dtype=np.str_),
            trainable=np.array(self.trainable),
        )

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingMatrix":
        data = np.load(path, allow_pickle=False)
        tokens = [str(t) for t in data["tokens"]]
        return cls(
            vocab={t: i + N_RESERVED for i, t in enumerate(tokens)},
            weights=data["weights"],
            trainable=bool(data["trainable"]),
        )


@dataclass
class EncodedSequence:
    """Fixed-length index sequence plus the pre-padding true length."""

    indices: np.ndarray
    true_len: int


def init_random(vocab: Sequence[str], dim: int, seed: int) -> EmbeddingMatrix:
    """Trainable matrix with rows i.i.d. uniform on [-0.05, 0.05] (UNK
    included); the PAD row stays zero."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if len(set(vocab)) != len(vocab):
        raise ValueError("vocabulary contains duplicate tokens")
    rng = np.random.default_rng(seed)
    weights = rng.uniform(-INIT_RANGE, INIT_RANGE, size=(len(vocab) + N_RESERVED, dim))
    weights[PAD_INDEX] = 0.0
    return EmbeddingMatrix(
        vocab={t: i + N_RESERVED for i, t in enumerate(vocab)},
        weights=weights,
        trainable=True,
    )


def load_pretrained_vec(path: str | Path) -> EmbeddingMatrix:
    """Load a text .vec embedding file (optional ``count dim`` header, then
    ``token v1 ... v_dim`` per line). The result is frozen; the UNK row is
    the mean of all loaded vectors."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()

    start = 0
    if lines:
        first = lines[0].split()
        if len(first) == 2:
            try:
                int(first[0]), int(first[1])
                start = 1
            except ValueError:
                pass

    tokens: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dim: int | None = None
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        parts = line.rstrip().split(" ")
        token, values = parts[0], parts[1:]
        if dim is None:
            dim = len(values)
            if dim == 0:
                raise ParseError(f"{path}: no vector values", line=lineno)
        elif len(values) != dim:
            raise ParseError(
                f"{path}: expected {dim} values, got {len(values)}", line=lineno
            )
        if token in seen:
            raise ParseError(f"{path}: duplicate token {token!r}", line=lineno)
        seen.add(token)
        try:
            rows.append(np.array([float(v) for v in values]))
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}", line=lineno) from exc
        tokens.append(token)

    if not rows:
        raise ParseError(f"{path}: no embedding vectors found", line=1)
    matrix = np.stack(rows)
    weights = np.zeros((len(tokens) + N_RESERVED, matrix.shape[1]))
    weights[UNK_INDEX] = matrix.mean(axis=0)
    weights[N_RESERVED:] = matrix
    return EmbeddingMatrix(
        vocab={t: i + N_RESERVED for i, t in enumerate(tokens)},
        weights=weights,
        trainable=False,
    )


def encode(m: EmbeddingMatrix, doc: TokenList, max_len: int = DEFAULT_MAX_LEN) -> EncodedSequence:
    """Map tokens to rows (UNK for out-of-vocabulary), truncate to max_len,
    pad the tail with PAD."""
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    kept = doc[:max_len]
    indices = np.full(max_len, PAD_INDEX, dtype=np.int64)
    for i, token in enumerate(kept):
        indices[i] = m.index(token)
    return EncodedSequence(indices=indices, true_len=len(kept))


def encode_batch(
    m: EmbeddingMatrix, docs: Sequence[TokenList], max_len: int = DEFAULT_MAX_LEN
) -> tuple[np.ndarray, np.ndarray]:
    """Index matrix (N, max_len) and true-length vector for a doc batch."""
    indices = np.full((len(docs), max_len), PAD_INDEX, dtype=np.int64)
    lengths = np.zeros(len(docs), dtype=np.int64)
    for i, doc in enumerate(docs):
        enc = encode(m, doc, max_len)
        indices[i] = enc.indices
        lengths[i] = enc.true_len
    return indices, lengths
