"""Classifier families: majority baseline, logistic regression, and the
three BiLSTM variants, plus grid search and checkpointing."""

from .base import (
    CLASS_WEIGHT_MODES,
    MODEL_KINDS,
    FeatureSpec,
    TrainConfig,
    class_weights_from,
    sample_weights,
    weights_for_counts,
)
from .baseline import MajorityModel, majority_baseline
from .bilstm import BILSTM_KINDS, BiLstmModel, new_bilstm_model, train_bilstm
from .checkpoint import load_model, save_model
from .gridsearch import GridCell, GridSearchResult, grid_search_cv, stratified_folds
from .logreg import LogRegModel, train_logreg
from .train import DEFAULT_EMBED_DIM, train_model, train_vocabulary

__all__ = [
    "BILSTM_KINDS",
    "BiLstmModel",
    "CLASS_WEIGHT_MODES",
    "DEFAULT_EMBED_DIM",
    "FeatureSpec",
    "GridCell",
    "GridSearchResult",
    "LogRegModel",
    "MODEL_KINDS",
    "MajorityModel",
    "TrainConfig",
    "class_weights_from",
    "grid_search_cv",
    "load_model",
    "majority_baseline",
    "new_bilstm_model",
    "sample_weights",
    "save_model",
    "stratified_folds",
    "train_bilstm",
    "train_logreg",
    "train_model",
    "train_vocabulary",
    "weights_for_counts",
]
