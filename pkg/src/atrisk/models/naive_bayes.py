"""Bernoulli naive Bayes with add-one smoothing.

Features are treated as binary events; fractional inputs (synthetic
oversampled rows) are thresholded at 0.5 inside this model only, since a
Bernoulli likelihood needs 0/1 outcomes.
"""

from __future__ import annotations

import numpy as np

from .base import TrainedModel, check_training_labels


def _binarize(rows):
    return rows >= 0.5


class NaiveBayesModel(TrainedModel):
    def __init__(self, spec, log_prior, log_theta, log_one_minus_theta):
        # log_theta[c] has one entry per feature; class order (false, true)
        super().__init__(spec, n_features=log_theta.shape[1])
        for arr in (log_prior, log_theta, log_one_minus_theta):
            arr.setflags(write=False)
        self.log_prior = log_prior
        self.log_theta = log_theta
        self.log_one_minus_theta = log_one_minus_theta

    def _proba(self, rows):
        xb = _binarize(rows).astype(np.float64)
        joint = np.empty((rows.shape[0], 2))
        for c in range(2):
            joint[:, c] = (self.log_prior[c]
                           + xb @ self.log_theta[c]
                           + (1.0 - xb) @ self.log_one_minus_theta[c])
        peak = joint.max(axis=1, keepdims=True)
        unnorm = np.exp(joint - peak)
        return unnorm / unnorm.sum(axis=1, keepdims=True)

    def _state(self):
        return {"log_prior": self.log_prior.tolist(),
                "log_theta": self.log_theta.tolist(),
                "log_one_minus_theta": self.log_one_minus_theta.tolist()}

    @classmethod
    def from_state(cls, spec, state, n_features, non_converged):
        return cls(spec,
                   np.asarray(state["log_prior"]),
                   np.asarray(state["log_theta"]),
                   np.asarray(state["log_one_minus_theta"]))


def fit_naive_bayes(spec, train):
    check_training_labels(spec, train.labels)
    xb = _binarize(train.features)
    n = train.n_rows
    log_prior = np.empty(2)
    log_theta = np.empty((2, train.n_features))
    log_one_minus_theta = np.empty((2, train.n_features))
    for c, label in enumerate((False, True)):
        mask = train.labels == label
        n_c = int(mask.sum())
        counts = xb[mask].sum(axis=0)
        theta = (counts + 1.0) / (n_c + 2.0)
        log_prior[c] = np.log(n_c / n)
        log_theta[c] = np.log(theta)
        log_one_minus_theta[c] = np.log1p(-theta)
    return NaiveBayesModel(spec, log_prior, log_theta, log_one_minus_theta)
