"""Shared fixtures: synthetic datasets shaped like the real label
distributions, and a keyword-rule corpus whose labels are learnable from
unigrams."""

from __future__ import annotations

import numpy as np

from offlang.corpus import Dataset, HierLabel, Lexicon, Post
from offlang.features import SentimentLexicon

PATTERNS = {
    "NOT": HierLabel("NOT"),
    "OFF-UNT": HierLabel("OFF", "UNT"),
    "OFF-TIN-IND": HierLabel("OFF", "TIN", "IND"),
    "OFF-TIN-OTH": HierLabel("OFF", "TIN", "OTH"),
    "OFF-TIN-GRP": HierLabel("OFF", "TIN", "GRP"),
}

# per-pattern train/test sizes of the annotated Danish corpus
DANISH_TRAIN_COUNTS = {
    "OFF-TIN-IND": 77,
    "OFF-TIN-OTH": 30,
    "OFF-TIN-GRP": 98,
    "OFF-UNT": 147,
    "NOT": 2527,
}
DANISH_TEST_COUNTS = {
    "OFF-TIN-IND": 18,
    "OFF-TIN-OTH": 6,
    "OFF-TIN-GRP": 23,
    "OFF-UNT": 42,
    "NOT": 632,
}


def make_patterned_dataset(counts: dict[str, int], name: str, start_id: int = 0) -> Dataset:
    posts = []
    i = start_id
    for pattern, n in counts.items():
        for _ in range(n):
            posts.append((Post(f"p{i}", f"synthetic post number {i}"), PATTERNS[pattern]))
            i += 1
    return Dataset(name, tuple(posts))


def danish_shaped_split() -> tuple[Dataset, Dataset]:
    train = make_patterned_dataset(DANISH_TRAIN_COUNTS, "da-train")
    test = make_patterned_dataset(DANISH_TEST_COUNTS, "da-test", start_id=10_000)
    return train, test


NEUTRAL_WORDS = [
    "hund", "kat", "hus", "vejr", "kaffe", "arbejde", "cykel", "film",
    "musik", "mad", "by", "skov", "bog", "avis", "tog", "bus", "vand",
    "sol", "regn", "vinter", "sommer", "ven", "familie", "skole", "spil",
    "billede", "have", "gade", "butik", "aften",
]
PROFANE_WORDS = ["fucking", "lort", "idiot", "svin", "dum", "kraftedeme"]


def keyword_lexicon() -> Lexicon:
    return Lexicon.from_terms(PROFANE_WORDS)


def keyword_sentiment_lexicon() -> SentimentLexicon:
    scores = {w: -3 for w in PROFANE_WORDS}
    scores.update({"sol": 2, "ven": 2, "musik": 1})
    return SentimentLexicon(scores)


def make_keyword_corpus(n: int, seed: int, offensive_rate: float = 0.4) -> Dataset:
    """Posts are offensive exactly when they contain a profane keyword."""
    rng = np.random.default_rng(seed)
    posts = []
    for i in range(n):
        length = int(rng.integers(5, 14))
        tokens = [NEUTRAL_WORDS[j] for j in rng.integers(0, len(NEUTRAL_WORDS), length)]
        if rng.random() < offensive_rate:
            for _ in range(int(rng.integers(1, 3))):
                pos = int(rng.integers(0, len(tokens) + 1))
                word = PROFANE_WORDS[int(rng.integers(0, len(PROFANE_WORDS)))]
                tokens.insert(pos, word)
            label = HierLabel("OFF", "UNT")
        else:
            label = HierLabel("NOT")
        posts.append((Post(f"k{i}", " ".join(tokens)), label))
    return Dataset(f"keyword-{n}", tuple(posts))
