"""Confusion matrices, per-class precision/recall/F1, macro-F1, and the
cascaded A -> B -> C pipeline.

Undefined precision or recall (zero denominator) counts as 0, and macro
averaging runs over every class in the given class list whether or not it
was ever predicted; single-class baselines then score exactly
(2 * n_max / N) / (1 + n_max / N) / K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import TASK_CLASSES, Dataset, HierLabel, Post, task_items


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple[str, ...]
    counts: np.ndarray  # (K, K), rows = gold, cols = predicted

    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ClassMetrics:
    classes: tuple[str, ...]
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    macro_f1: float
    confusion: ConfusionMatrix


def confusion(gold: Sequence[str], pred: Sequence[str], classes: Sequence[str]) -> ConfusionMatrix:
    if len(gold) != len(pred):
        raise ValueError(f"gold and predictions differ in length: {len(gold)} vs {len(pred)}")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=int)
    for g, p in zip(gold, pred):
        if g not in index:
            raise ValueError(f"gold label {g!r} not in class list {tuple(classes)}")
        if p not in index:
            raise ValueError(f"predicted label {p!r} not in class list {tuple(classes)}")
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(tuple(classes), counts)


def metrics(gold: Sequence[str], pred: Sequence[str], classes: Sequence[str]) -> ClassMetrics:
    if not gold:
        raise ValueError("cannot compute metrics on an empty sample")
    cm = confusion(gold, pred, classes)
    precision: dict[str, float] = {}
    recall: dict[str, float] = {}
    f1: dict[str, float] = {}
    for i, c in enumerate(classes):
        tp = cm.counts[i, i]
        fp = cm.counts[:, i].sum() - tp
        fn = cm.counts[i, :].sum() - tp
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        r = tp / (tp + fn) if tp + fn > 0 else 0.0
        precision[c] = float(p)
        recall[c] = float(r)
        f1[c] = float(2 * p * r / (p + r)) if p + r > 0 else 0.0
    macro = float(np.mean([f1[c] for c in classes]))
    return ClassMetrics(tuple(classes), precision, recall, f1, macro, cm)


def evaluate_model(model, test: Dataset) -> ClassMetrics:
    """Score a single-task model on the gold-restricted test subset (all
    posts for A, gold-OFF posts for B, gold-TIN posts for C)."""
    items = task_items(test, model.task)
    if not items:
        raise ValueError(f"test set has no samples for task {model.task}")
    gold = [label for _, label in items]
    pred = model.predict([post for post, _ in items])
    return metrics(gold, pred, TASK_CLASSES[model.task])


def run_pipeline(model_a, model_b, model_c, posts: Sequence[Post]) -> list[HierLabel]:
    """Cascade: level B is predicted only where A said OFF, level C only
    where B said TIN; outputs are always structurally valid."""
    for model, task in ((model_a, "A"), (model_b, "B"), (model_c, "C")):
        if model.task != task:
            raise ValueError(f"expected a task-{task} model, got task {model.task}")
    posts = list(posts)
    a_pred = model_a.predict(posts) if posts else []

    off_posts = [p for p, a in zip(posts, a_pred) if a == "OFF"]
    b_by_id: dict[str, str] = {}
    if off_posts:
        for post, b in zip(off_posts, model_b.predict(off_posts)):
            b_by_id[post.id] = b

    tin_posts = [p for p in off_posts if b_by_id[p.id] == "TIN"]
    c_by_id: dict[str, str] = {}
    if tin_posts:
        for post, c in zip(tin_posts, model_c.predict(tin_posts)):
            c_by_id[post.id] = c

    labels = []
    for post, a in zip(posts, a_pred):
        if a == "NOT":
            labels.append(HierLabel("NOT"))
        else:
            b = b_by_id[post.id]
            c = c_by_id[post.id] if b == "TIN" else None
            labels.append(HierLabel("OFF", b, c))
    return labels


def pipeline_metrics(
    gold: Sequence[HierLabel], pred: Sequence[HierLabel]
) -> dict[str, ClassMetrics]:
    """Per-task metrics of cascaded predictions, each task scored on its
    gold-restricted subset."""
    out: dict[str, ClassMetrics] = {}
    for task in ("A", "B", "C"):
        pairs = [
            (g.level(task), p.level(task))
            for g, p in zip(gold, pred)
            if g.level(task) is not None
        ]
        if not pairs:
            continue
        gold_l = [g for g, _ in pairs]
        # a cascaded prediction may not reach this level; count it as the
        # level's last class so it scores as a miss rather than crashing
        classes = TASK_CLASSES[task]
        pred_l = [p if p is not None else "<none>" for _, p in pairs]
        ext_classes = tuple(classes) + (("<none>",) if "<none>" in pred_l else ())
        m = metrics(gold_l, pred_l, ext_classes)
        # macro over the real classes only
        macro = float(np.mean([m.f1[c] for c in classes]))
        out[task] = ClassMetrics(
            tuple(classes),
            {c: m.precision[c] for c in classes},
            {c: m.recall[c] for c in classes},
            {c: m.f1[c] for c in classes},
            macro,
            m.confusion,
        )
    return out


def format_report(m: ClassMetrics, title: str = "") -> str:
    """Textual table: recall, precision, F1 per class plus macro."""
    lines = []
    if title:
        lines.append(title)
    header = f"{'class':<8}{'R':>8}{'P':>8}{'F1':>8}"
    lines.append(header)
    lines.append("-" * len(header))
    for c in m.classes:
        lines.append(f"{c:<8}{m.recall[c]:>8.3f}{m.precision[c]:>8.3f}{m.f1[c]:>8.3f}")
    lines.append(f"{'macro':<8}{'':>8}{'':>8}{m.macro_f1:>8.3f}")
    return "\n".join(lines)


def metrics_to_dict(m: ClassMetrics) -> dict:
    return {
        "classes": list(m.classes),
        "precision": dict(m.precision),
        "recall": dict(m.recall),
        "f1": dict(m.f1),
        "macro_f1": m.macro_f1,
        "confusion": m.confusion.counts.tolist(),
    }
