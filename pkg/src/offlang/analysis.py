"""Error analysis: misclassified-sample slices, TF-IDF n-gram mining and
length statistics."""

from __future__ import annotations

from dataclasses import dataclass
from statistics import mean, median
from typing import Sequence

from .corpus import TASK_CLASSES, Dataset, Post, task_items
from .features import fit_tfidf, tokenize, transform_tfidf


@dataclass(frozen=True)
class ErrorSlice:
    gold: str
    predicted: str
    posts: tuple[Post, ...]

    @property
    def direction(self) -> tuple[str, str]:
        return (self.gold, self.predicted)


def error_slices(model, test: Dataset, task: str | None = None) -> list[ErrorSlice]:
    """One slice per ordered (gold != predicted) pair with at least one
    member; the union of slices is exactly the model's errors on the
    task-restricted test subset."""
    task = task or model.task
    if task != model.task:
        raise ValueError(f"model is trained for task {model.task}, not {task}")
    items = task_items(test, task)
    posts = [post for post, _ in items]
    gold = [label for _, label in items]
    pred = model.predict(posts)

    by_direction: dict[tuple[str, str], list[Post]] = {}
    for post, g, p in zip(posts, gold, pred):
        if g != p:
            by_direction.setdefault((g, p), []).append(post)

    classes = TASK_CLASSES[task]
    ordered = sorted(by_direction, key=lambda d: (classes.index(d[0]), classes.index(d[1])))
    return [ErrorSlice(g, p, tuple(by_direction[(g, p)])) for g, p in ordered]


def top_ngrams(
    slice_: ErrorSlice,
    background: Dataset,
    n_range: tuple[int, int] = (1, 2),
    k: int = 20,
) -> list[tuple[str, float]]:
    """Top-k n-grams of a slice, scored by the mean TF-IDF weight over the
    slice documents with the idf fitted on the background corpus. Ties are
    broken alphabetically."""
    if not slice_.posts:
        raise ValueError("cannot mine an empty error slice")
    model = fit_tfidf([tokenize(t) for t in background.texts()], n_range=n_range)
    total = None
    for post in slice_.posts:
        vec = transform_tfidf(model, tokenize(post.text))
        total = vec if total is None else total + vec
    scores = total / len(slice_.posts)

    grams = sorted(model.vocab, key=model.vocab.get)
    ranked = sorted(zip(grams, scores), key=lambda gs: (-gs[1], gs[0]))
    return [(g, float(s)) for g, s in ranked[:k]]


def length_stats(slice_: ErrorSlice) -> tuple[float, float]:
    """Mean and median character count of the posts in a slice."""
    if not slice_.posts:
        raise ValueError("cannot compute length statistics of an empty slice")
    lengths = [len(post.text) for post in slice_.posts]
    return float(mean(lengths)), float(median(lengths))


def analysis_report(
    model,
    test: Dataset,
    n_range: tuple[int, int] = (1, 2),
    k: int = 20,
) -> dict:
    """Machine-readable error-analysis summary for one model on a test set."""
    slices = error_slices(model, test)
    report = {"task": model.task, "n_errors": sum(len(s.posts) for s in slices), "slices": []}
    for s in slices:
        mean_len, median_len = length_stats(s)
        report["slices"].append(
            {
                "gold": s.gold,
                "predicted": s.predicted,
                "count": len(s.posts),
                "mean_chars": mean_len,
                "median_chars": median_len,
                "top_ngrams": [[g, score] for g, score in top_ngrams(s, test, n_range, k)],
            }
        )
    return report


def format_analysis_report(report: dict) -> str:
    lines = [f"task {report['task']}: {report['n_errors']} misclassified samples"]
    for s in report["slices"]:
        lines.append(
            f"\n{s['gold']} -> {s['predicted']}: {s['count']} posts, "
            f"mean {s['mean_chars']:.1f} chars, median {s['median_chars']:.1f}"
        )
        for gram, score in s["top_ngrams"]:
            lines.append(f"  {score:8.4f}  {gram}")
    return "\n".join(lines)
