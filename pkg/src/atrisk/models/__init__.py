"""Classifier suite: fit dispatch and model persistence."""

from __future__ import annotations

import json

import numpy as np

from .base import (DEFAULT_PARAMS, MODEL_FORMAT, MODEL_KINDS, MODEL_VERSION,
                   ModelSpec, TrainedModel)
from .knn import KnnModel, fit_knn
from .logistic import LogisticModel, fit_logistic
from .naive_bayes import NaiveBayesModel, fit_naive_bayes
from .svm import SvmModel, fit_svm
from .tree import (DecisionTreeModel, RandomForestModel, fit_decision_tree,
                   fit_random_forest)

_FITTERS = {
    "logreg": fit_logistic,
    "naive_bayes": fit_naive_bayes,
    "decision_tree": fit_decision_tree,
    "random_forest": fit_random_forest,
    "knn": fit_knn,
    "svm_linear": fit_svm,
    "svm_rbf": fit_svm,
}

_CLASSES = {
    "logreg": LogisticModel,
    "naive_bayes": NaiveBayesModel,
    "decision_tree": DecisionTreeModel,
    "random_forest": RandomForestModel,
    "knn": KnnModel,
    "svm_linear": SvmModel,
    "svm_rbf": SvmModel,
}


def fit(spec, train):
    """Fit a classifier of spec.kind on a LabeledDataset."""
    if not np.isfinite(train.features).all():
        raise ValueError("training features must be finite")
    if train.n_rows == 0:
        raise ValueError("cannot fit on an empty dataset")
    return _FITTERS[spec.kind](spec, train)


def load_model(path):
    """Load a model saved by TrainedModel.save; validates the format."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not an atrisk model file")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version "
                         f"{doc.get('version')!r}")
    params = dict(doc["params"])
    spec = ModelSpec(doc["kind"], **params)
    cls = _CLASSES[spec.kind]
    return cls.from_state(spec, doc["state"], n_features=doc["n_features"],
                          non_converged=doc["non_converged"])


__all__ = [
    "DEFAULT_PARAMS", "MODEL_KINDS", "ModelSpec", "TrainedModel",
    "fit", "load_model",
    "LogisticModel", "NaiveBayesModel", "DecisionTreeModel",
    "RandomForestModel", "KnnModel", "SvmModel",
]
