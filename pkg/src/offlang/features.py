"""Non-embedding feature extraction.

Tokenization, word/char n-gram TF-IDF, lexicon sentiment compounds,
readability scores, surface counters, and the assembly of the auxiliary
feature vector used by the logistic-regression and aux-BiLSTM models.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import ValidationError

TokenList = list[str]

_TOKEN_RE = re.compile(r"https?://\S+|[@#]\w+|[^\W_]+")
_SENTENCE_RE = re.compile(r"[.!?]+")
_VOWELS = frozenset("aeiouyæøå")
_VOWEL_GROUP_RE = re.compile(r"[aeiouyæøå]+")

# normalization constant of the sentiment compound s / sqrt(s^2 + alpha)
SENTIMENT_ALPHA = 15.0


def tokenize(text: str) -> TokenList:
    """Lowercase and split on non-alphanumerics, keeping @mentions,
    #hashtags and http(s) URLs as single tokens."""
    return _TOKEN_RE.findall(text.lower())


def word_ngrams(tokens: Sequence[str], n_range: tuple[int, int]) -> list[str]:
    """All word n-grams in the order range, space-joined into strings."""
    lo, hi = n_range
    out: list[str] = []
    for n in range(lo, hi + 1):
        out.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return out


def char_ngrams(tokens: Sequence[str], n_range: tuple[int, int]) -> list[str]:
    """Character n-grams over the space-joined token stream."""
    text = " ".join(tokens)
    lo, hi = n_range
    out: list[str] = []
    for n in range(lo, hi + 1):
        out.extend(text[i : i + n] for i in range(len(text) - n + 1))
    return out


def _doc_ngrams(tokens: Sequence[str], n_range: tuple[int, int], mode: str) -> list[str]:
    if mode == "word":
        return word_ngrams(tokens, n_range)
    if mode == "char":
        return char_ngrams(tokens, n_range)
    raise ValueError(f"unknown n-gram mode {mode!r}")


@dataclass
class TfIdfModel:
    """Fitted TF-IDF vocabulary. Column indices are dense and assigned in
    sorted n-gram order so fitting is order-independent."""

    vocab: dict[str, int]
    doc_freq: dict[str, int]
    n_docs: int
    n_range: tuple[int, int]
    mode: str

    @property
    def dim(self) -> int:
        return len(self.vocab)

    def idf(self, ngram: str) -> float:
        return math.log(self.n_docs / self.doc_freq[ngram]) + 1.0


def fit_tfidf(
    docs: Sequence[TokenList],
    n_range: tuple[int, int] = (1, 1),
    mode: str = "word",
    min_df: int = 1,
) -> TfIdfModel:
    if not docs:
        raise ValueError("cannot fit TF-IDF on an empty corpus")
    lo, hi = n_range
    if not 1 <= lo <= hi:
        raise ValueError(f"invalid n-gram range {n_range}")
    df: dict[str, int] = {}
    for tokens in docs:
        if any(not t for t in tokens):
            raise ValidationError("token lists must not contain empty tokens")
        for gram in set(_doc_ngrams(tokens, n_range, mode)):
            df[gram] = df.get(gram, 0) + 1
    kept = sorted(g for g, n in df.items() if n >= min_df)
    return TfIdfModel(
        vocab={g: i for i, g in enumerate(kept)},
        doc_freq={g: df[g] for g in kept},
        n_docs=len(docs),
        n_range=n_range,
        mode=mode,
    )


def transform_tfidf(model: TfIdfModel, doc: TokenList) -> np.ndarray:
    """tf(g) * (ln(n_docs / df(g)) + 1) per vocabulary n-gram; n-grams
    outside the vocabulary are ignored. Dense vector, mostly zeros."""
    vec = np.zeros(model.dim)
    for gram in _doc_ngrams(doc, model.n_range, model.mode):
        col = model.vocab.get(gram)
        if col is not None:
            vec[col] += model.idf(gram)
    return vec


@dataclass(frozen=True)
class SentimentLexicon:
    """AFINN-style word valence map (integers in [-5, 5])."""

    scores: Mapping[str, int]

    def __post_init__(self):
        if not self.scores:
            raise ValidationError("sentiment lexicon must not be empty")
        for word, score in self.scores.items():
            if not -5 <= score <= 5:
                raise ValidationError(f"sentiment score for {word!r} out of [-5, 5]: {score}")

    @classmethod
    def load(cls, path: str | Path) -> "SentimentLexicon":
        """``word<TAB>integer`` per line, UTF-8."""
        scores: dict[str, int] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                word, _, value = line.partition("\t")
                scores[word.lower()] = int(value)
        return cls(scores)


def sentiment_compound(lex: SentimentLexicon, doc: TokenList) -> float:
    """Normalized sum of per-token valences, mapped into (-1, +1)."""
    s = sum(lex.scores.get(token, 0) for token in doc)
    if s == 0:
        return 0.0
    return s / math.sqrt(s * s + SENTIMENT_ALPHA)


def count_syllables(word: str) -> int:
    """Number of maximal vowel-group runs (vowels aeiouyæøå), minimum 1.
    A trailing lone 'e' in words of three or more letters is silent."""
    if not word:
        raise ValueError("cannot count syllables of an empty word")
    w = word.lower()
    groups = _VOWEL_GROUP_RE.findall(w)
    n = len(groups)
    if n > 0 and len(w) >= 3 and w.endswith("e") and groups[-1] == "e":
        n -= 1
    return max(1, n)


def _sentence_count(text: str) -> int:
    return max(1, len(_SENTENCE_RE.findall(text)))


def flesch_reading_ease(text: str) -> float:
    words = tokenize(text)
    if not words:
        raise ValueError("reading-ease score needs at least one word")
    syllables = sum(count_syllables(w) for w in words)
    sentences = _sentence_count(text)
    return 206.835 - 1.015 * (len(words) / sentences) - 84.6 * (syllables / len(words))


def fk_grade_level(text: str) -> float:
    words = tokenize(text)
    if not words:
        raise ValueError("grade-level score needs at least one word")
    syllables = sum(count_syllables(w) for w in words)
    sentences = _sentence_count(text)
    return 0.39 * (len(words) / sentences) + 11.8 * (syllables / len(words)) - 15.59


@dataclass(frozen=True)
class SurfaceStats:
    n_chars: int
    n_syllables: int
    n_words: int
    n_hashtags: int
    n_urls: int
    n_mentions: int
    n_retweets: int

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.n_chars,
                self.n_syllables,
                self.n_words,
                self.n_hashtags,
                self.n_urls,
                self.n_mentions,
                self.n_retweets,
            ],
            dtype=float,
        )


def surface_counts(text: str) -> SurfaceStats:
    tokens = tokenize(text)
    return SurfaceStats(
        n_chars=len(text),
        n_syllables=sum(count_syllables(t) for t in tokens),
        n_words=len(tokens),
        n_hashtags=sum(t.startswith("#") for t in tokens),
        n_urls=sum(t.startswith(("http://", "https://")) for t in tokens),
        n_mentions=sum(t.startswith("@") for t in tokens),
        n_retweets=sum(t == "rt" for t in tokens),
    )


class Channel(NamedTuple):
    name: str
    offset: int
    length: int


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    layout: tuple[Channel, ...]

    def channel(self, name: str) -> np.ndarray:
        for ch in self.layout:
            if ch.name == name:
                return self.values[ch.offset : ch.offset + ch.length]
        raise KeyError(name)


def build_aux_vector(
    text: str,
    tfidf: TfIdfModel,
    lex: SentimentLexicon,
    pos_tags: TokenList | None = None,
    pos_tfidf: TfIdfModel | None = None,
) -> FeatureVector:
    """Assemble the auxiliary feature vector with the fixed channel order
    [tfidf | pos_tfidf | sentiment | counts | reading].

    The POS block length is set by the fitted POS model and filled with
    zeros when no tags are supplied for this text. Reading scores are 0 for
    texts without words (the standalone score functions raise instead).
    """
    if pos_tags is not None and pos_tfidf is None:
        raise ValueError("pos_tags supplied without a fitted pos_tfidf model")
    tokens = tokenize(text)

    pos_dim = pos_tfidf.dim if pos_tfidf is not None else 0
    if pos_tfidf is not None and pos_tags is not None:
        pos_block = transform_tfidf(pos_tfidf, pos_tags)
    else:
        pos_block = np.zeros(pos_dim)

    if tokens:
        reading = [flesch_reading_ease(text), fk_grade_level(text)]
    else:
        reading = [0.0, 0.0]

    blocks = [
        ("tfidf", transform_tfidf(tfidf, tokens)),
        ("pos_tfidf", pos_block),
        ("sentiment", np.array([sentiment_compound(lex, tokens)])),
        ("counts", surface_counts(text).as_array()),
        ("reading", np.array(reading)),
    ]
    layout = []
    offset = 0
    for name, block in blocks:
        layout.append(Channel(name, offset, len(block)))
        offset += len(block)
    return FeatureVector(np.concatenate([b for _, b in blocks]), tuple(layout))


@dataclass
class AuxExtractor:
    """Fitted bundle turning raw text into auxiliary feature vectors with a
    stable layout."""

    tfidf: TfIdfModel
    lexicon: SentimentLexicon
    pos_tfidf: TfIdfModel | None = None

    @classmethod
    def fit(
        cls,
        texts: Iterable[str],
        lexicon: SentimentLexicon,
        n_range: tuple[int, int] = (1, 3),
        mode: str = "word",
        min_df: int = 1,
        pos_docs: Sequence[TokenList] | None = None,
        pos_n_range: tuple[int, int] = (1, 3),
        pos_min_df: int = 1,
    ) -> "AuxExtractor":
        docs = [tokenize(t) for t in texts]
        tfidf = fit_tfidf(docs, n_range=n_range, mode=mode, min_df=min_df)
        pos_model = None
        if pos_docs is not None:
            pos_model = fit_tfidf(pos_docs, n_range=pos_n_range, min_df=pos_min_df)
        return cls(tfidf, lexicon, pos_model)

    @property
    def dim(self) -> int:
        pos_dim = self.pos_tfidf.dim if self.pos_tfidf is not None else 0
        return self.tfidf.dim + pos_dim + 1 + 7 + 2

    def transform(self, text: str, pos_tags: TokenList | None = None) -> FeatureVector:
        return build_aux_vector(text, self.tfidf, self.lexicon, pos_tags, self.pos_tfidf)

    def transform_matrix(
        self, texts: Sequence[str], pos_tags: Sequence[TokenList] | None = None
    ) -> np.ndarray:
        rows = []
        for i, text in enumerate(texts):
            tags = pos_tags[i] if pos_tags is not None else None
            rows.append(self.transform(text, tags).values)
        return np.stack(rows) if rows else np.zeros((0, self.dim))


def load_pos_tags(path: str | Path) -> list[TokenList]:
    """POS input: one post per line, whitespace-separated ``token/TAG``
    pairs; returns the tag sequences in line order."""
    out: list[TokenList] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            tags = [pair.rsplit("/", 1)[-1] for pair in line.split()]
            out.append(tags)
    return out
