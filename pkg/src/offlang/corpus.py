"""Corpus data model: posts, hierarchical labels, datasets, and file I/O.

Labels live in a three-level hierarchy:

* level A: NOT / OFF (offensive or not)
* level B: TIN / UNT (targeted insult vs untargeted), only for OFF posts
* level C: IND / GRP / OTH (target type), only for TIN posts

The native interchange format is the OLID-style TSV
(``id<TAB>tweet<TAB>subtask_a<TAB>subtask_b<TAB>subtask_c``) with a literal
``NULL`` for absent levels, which allows the public English dataset to be
used directly.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import ParseError, ValidationError

SOURCES = ("facebook", "reddit", "twitter", "other")
A_LABELS = ("NOT", "OFF")
B_LABELS = ("TIN", "UNT")
C_LABELS = ("IND", "GRP", "OTH")
TASKS = ("A", "B", "C")
TASK_CLASSES = {"A": A_LABELS, "B": B_LABELS, "C": C_LABELS}

OLID_HEADER = ("id", "tweet", "subtask_a", "subtask_b", "subtask_c")

# Tokens are maximal alphanumeric runs; @mentions, #hashtags and URLs stay
# whole so that e.g. "#John" is a hashtag, not a name occurrence.
_PROTECTED_TOKEN_RE = re.compile(r"https?://\S+|[@#]\w+|[^\W_]+", re.IGNORECASE)


@dataclass(frozen=True)
class HierLabel:
    """One three-level label. ``b`` exists iff ``a == OFF``; ``c`` iff ``b == TIN``."""

    a: str
    b: str | None = None
    c: str | None = None

    def __post_init__(self):
        if self.a not in A_LABELS:
            raise ValidationError(f"unknown level-A label {self.a!r}")
        if self.b is not None and self.b not in B_LABELS:
            raise ValidationError(f"unknown level-B label {self.b!r}")
        if self.c is not None and self.c not in C_LABELS:
            raise ValidationError(f"unknown level-C label {self.c!r}")
        if (self.a == "OFF") != (self.b is not None):
            raise ValidationError(
                f"level B must be present exactly for OFF posts, got a={self.a} b={self.b}"
            )
        if (self.b == "TIN") != (self.c is not None):
            raise ValidationError(
                f"level C must be present exactly for TIN posts, got b={self.b} c={self.c}"
            )

    def pattern(self) -> tuple[str, str | None, str | None]:
        return (self.a, self.b, self.c)

    def pattern_str(self) -> str:
        return "-".join(p for p in self.pattern() if p is not None)

    def level(self, task: str) -> str | None:
        """The label at one hierarchy level (``None`` where not applicable)."""
        if task == "A":
            return self.a
        if task == "B":
            return self.b
        if task == "C":
            return self.c
        raise ValueError(f"unknown task {task!r}")


@dataclass(frozen=True)
class Post:
    id: str
    text: str
    source: str = "other"

    def __post_init__(self):
        if not self.text.strip():
            raise ValidationError(f"post {self.id!r} has empty text")
        if self.source not in SOURCES:
            raise ValidationError(f"post {self.id!r} has unknown source {self.source!r}")


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of labeled posts with unique ids."""

    name: str
    posts: tuple[tuple[Post, HierLabel], ...]

    def __post_init__(self):
        object.__setattr__(self, "posts", tuple(self.posts))
        seen: set[str] = set()
        for post, _ in self.posts:
            if post.id in seen:
                raise ValidationError(f"duplicate post id {post.id!r} in dataset {self.name!r}")
            seen.add(post.id)

    def __len__(self) -> int:
        return len(self.posts)

    def __iter__(self) -> Iterator[tuple[Post, HierLabel]]:
        return iter(self.posts)

    def texts(self) -> list[str]:
        return [post.text for post, _ in self.posts]

    def checksum(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for post, label in self.posts:
            h.update(f"{post.id}\x1f{post.text}\x1f{label.pattern_str()}\n".encode("utf-8"))
        return h.hexdigest()


@dataclass(frozen=True)
class LabelDistribution:
    counts: dict[tuple[str, str | None, str | None], int]
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValidationError("distribution counts do not sum to total")

    def by_pattern_str(self) -> dict[str, int]:
        return {HierLabel(*p).pattern_str(): n for p, n in self.counts.items()}


@dataclass(frozen=True)
class Lexicon:
    """A set of lowercase terms, e.g. the offensive/hateful term list."""

    terms: frozenset[str]

    def __post_init__(self):
        if not self.terms:
            raise ValidationError("lexicon must contain at least one term")
        for term in self.terms:
            if not term or term != term.strip().lower():
                raise ValidationError(f"lexicon term {term!r} is not lowercase/trimmed")

    @classmethod
    def from_terms(cls, terms: Iterable[str]) -> "Lexicon":
        cleaned = {t.strip().lower() for t in terms}
        cleaned.discard("")
        return cls(frozenset(cleaned))

    @classmethod
    def load(cls, path: str | Path) -> "Lexicon":
        """One term per line, UTF-8; blank lines ignored."""
        with open(path, encoding="utf-8") as fh:
            return cls.from_terms(fh.read().splitlines())


def load_olid_tsv(path: str | Path, source: str = "other", name: str | None = None) -> Dataset:
    """Load an OLID-style TSV file into a Dataset.

    The header row is required. ``NULL`` in the level B/C columns maps to an
    absent label; label combinations are validated against the hierarchy
    rules and malformed rows are reported with their line number.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file", line=1)
    header = tuple(lines[0].split("\t"))
    if header != OLID_HEADER:
        raise ParseError(f"{path}: expected header {OLID_HEADER}, got {header}", line=1)

    posts: list[tuple[Post, HierLabel]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 5:
            raise ParseError(f"{path}: expected 5 columns, got {len(cols)}", line=lineno)
        post_id, text, a, b, c = cols
        try:
            label = HierLabel(a, None if b == "NULL" else b, None if c == "NULL" else c)
            post = Post(post_id, text, source)
        except ValidationError as exc:
            raise ValidationError(f"{path} line {lineno}, post {post_id!r}: {exc}") from exc
        posts.append((post, label))
    return Dataset(name or path.stem, tuple(posts))


def save_olid_tsv(dataset: Dataset, path: str | Path) -> None:
    """Write a Dataset in the OLID TSV layout (UTF-8, LF line endings).

    Tabs and newlines inside post text would corrupt the column layout and
    are replaced by single spaces.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(OLID_HEADER) + "\n")
        for post, label in dataset:
            text = re.sub(r"[\t\r\n]", " ", post.text)
            fh.write(
                f"{post.id}\t{text}\t{label.a}\t{label.b or 'NULL'}\t{label.c or 'NULL'}\n"
            )


def load_posts_tsv(path: str | Path, source: str = "other") -> list[Post]:
    """Load unlabeled posts for annotation: ``id<TAB>text`` with a header."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or tuple(lines[0].split("\t")) != ("id", "text"):
        raise ParseError(f"{path}: expected header 'id<TAB>text'", line=1)
    posts = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ParseError(f"{path}: expected 2 columns, got {len(cols)}", line=lineno)
        posts.append(Post(cols[0], cols[1], source))
    return posts


def distribution(d: Dataset) -> LabelDistribution:
    counts = Counter(label.pattern() for _, label in d)
    return LabelDistribution(dict(counts), total=len(d))


def stratified_split(
    d: Dataset, train_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Split per label pattern: round(fraction * count) rows go to train,
    the remainder to test. Deterministic for a given seed; the union of the
    two halves is exactly the input.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    groups: dict[tuple, list[int]] = {}
    for i, (_, label) in enumerate(d):
        groups.setdefault(label.pattern(), []).append(i)

    train_idx: set[int] = set()
    for pattern in sorted(groups, key=lambda p: HierLabel(*p).pattern_str()):
        idx = groups[pattern]
        # round-half-up keeps the rule independent of banker's rounding
        n_train = min(len(idx), int(math.floor(train_fraction * len(idx) + 0.5)))
        chosen = rng.permutation(len(idx))[:n_train]
        train_idx.update(idx[j] for j in chosen)

    train_posts = tuple(d.posts[i] for i in range(len(d)) if i in train_idx)
    test_posts = tuple(d.posts[i] for i in range(len(d)) if i not in train_idx)
    return (
        Dataset(f"{d.name}-train", train_posts),
        Dataset(f"{d.name}-test", test_posts),
    )


def anonymize(text: str, names: Iterable[str]) -> str:
    """Replace whole-token, case-insensitive occurrences of personal names
    with the literal ``@USER``; everything else stays byte-identical.

    Mentions, hashtags and URLs count as single tokens and are never
    touched, which also makes the operation idempotent.
    """
    lowered = set()
    for raw in names:
        name = raw.strip().lower()
        if not name:
            raise ValueError("names must be nonempty strings")
        lowered.add(name)

    def replace(match: re.Match) -> str:
        token = match.group(0)
        if token[0] in "@#" or token.lower().startswith(("http://", "https://")):
            return token
        return "@USER" if token.lower() in lowered else token

    return _PROTECTED_TOKEN_RE.sub(replace, text)


def lexicon_filter(posts: Iterable[Post], lex: Lexicon) -> list[Post]:
    """Posts whose lowercased token set intersects the lexicon, original order."""
    from .features import tokenize

    return [post for post in posts if set(tokenize(post.text)) & lex.terms]


def task_items(d: Dataset, task: str) -> list[tuple[Post, str]]:
    """The task-restricted view of a dataset: all posts for level A, gold-OFF
    posts for level B, gold-TIN posts for level C, paired with the label at
    that level."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    items: list[tuple[Post, str]] = []
    for post, label in d:
        value = label.level(task)
        if value is not None:
            items.append((post, value))
    return items
