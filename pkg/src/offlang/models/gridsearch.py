"""Grid-search cross-validation over training hyper-parameters."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..corpus import TASK_CLASSES, Dataset
from ..embeddings import DEFAULT_MAX_LEN, EmbeddingMatrix
from ..errors import StratificationError
from .base import FeatureSpec, TrainConfig
from .train import DEFAULT_EMBED_DIM, train_model


@dataclass
class GridCell:
    params: dict
    fold_scores: list[float]

    @property
    def mean_macro_f1(self) -> float:
        return float(np.mean(self.fold_scores))


@dataclass
class GridSearchResult:
    best: TrainConfig
    best_params: dict
    best_score: float
    table: list[GridCell]


def stratified_folds(labels: Sequence[str], k: int, seed: int) -> list[np.ndarray]:
    """Deal each class round-robin into k folds after a seeded shuffle; every
    class must have at least k samples."""
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    rng = np.random.default_rng(seed)
    by_class: dict[str, list[int]] = {}
    for i, label in enumerate(labels):
        by_class.setdefault(label, []).append(i)
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in sorted(by_class):
        idx = by_class[label]
        if len(idx) < k:
            raise StratificationError(
                f"class {label!r} has {len(idx)} samples, fewer than {k} folds"
            )
        order = rng.permutation(len(idx))
        for pos, j in enumerate(order):
            folds[pos % k].append(idx[j])
    return [np.array(sorted(f)) for f in folds]


def grid_search_cv(
    kind: str,
    train: Dataset,
    task: str,
    grid: Mapping[str, Sequence],
    k_folds: int = 5,
    seed: int = 0,
    base_config: TrainConfig | None = None,
    features: FeatureSpec | None = None,
    emb: EmbeddingMatrix | None = None,
    embed_dim: int = DEFAULT_EMBED_DIM,
    max_len: int = DEFAULT_MAX_LEN,
    jobs: int = 1,
) -> GridSearchResult:
    """Evaluate every grid cell by k-fold mean macro-F1 on folds stratified
    by the task label. Ties keep the first cell in grid order; the full
    result table is returned alongside the winner."""
    from ..evaluation import metrics  # local import to avoid a cycle

    base = base_config or TrainConfig(seed=seed)
    pairs = [(post, label) for post, label in train if label.level(task) is not None]
    task_labels = [label.level(task) for _, label in pairs]
    folds = stratified_folds(task_labels, k_folds, seed)

    names = list(grid.keys())
    cells = [dict(zip(names, combo)) for combo in itertools.product(*(grid[n] for n in names))]

    def evaluate_cell(cell_params: dict) -> GridCell:
        cfg = base.with_overrides(**cell_params)
        scores = []
        for fold in folds:
            held_out = set(fold.tolist())
            fold_train = Dataset(
                f"{train.name}-cvtrain",
                tuple(p for i, p in enumerate(pairs) if i not in held_out),
            )
            model = train_model(
                kind, fold_train, task, cfg,
                features=features, emb=emb, embed_dim=embed_dim, max_len=max_len,
            )
            gold = [task_labels[i] for i in fold]
            pred = model.predict([pairs[i][0] for i in fold])
            scores.append(metrics(gold, pred, TASK_CLASSES[task]).macro_f1)
        return GridCell(params=cell_params, fold_scores=scores)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            table = list(pool.map(evaluate_cell, cells))
    else:
        table = [evaluate_cell(c) for c in cells]

    best_cell = table[0]
    for cell in table[1:]:
        if cell.mean_macro_f1 > best_cell.mean_macro_f1:
            best_cell = cell
    return GridSearchResult(
        best=base.with_overrides(**best_cell.params),
        best_params=best_cell.params,
        best_score=best_cell.mean_macro_f1,
        table=table,
    )
