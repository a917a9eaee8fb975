"""Majority-class baseline."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from ..corpus import TASK_CLASSES, Dataset, Post, task_items
from ..errors import InsufficientDataError
from .base import TrainConfig


@dataclass
class MajorityModel:
    task: str
    label: str
    config: TrainConfig = field(default_factory=TrainConfig)
    kind: str = "majority_baseline"

    @property
    def classes(self) -> tuple[str, ...]:
        return TASK_CLASSES[self.task]

    def predict(self, posts: Sequence[Post]) -> list[str]:
        return [self.label] * len(posts)


def majority_baseline(train: Dataset, task: str, config: TrainConfig | None = None) -> MajorityModel:
    """Predict the most frequent class of the task-restricted training set;
    ties break toward the fixed class order (NOT<OFF, TIN<UNT, IND<GRP<OTH)."""
    labels = [label for _, label in task_items(train, task)]
    if not labels:
        raise InsufficientDataError(f"no training samples for task {task}")
    counts = Counter(labels)
    best = max(TASK_CLASSES[task], key=lambda c: (counts.get(c, 0), -TASK_CLASSES[task].index(c)))
    return MajorityModel(task=task, label=best, config=config or TrainConfig())
