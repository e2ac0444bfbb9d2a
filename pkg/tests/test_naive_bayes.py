"""Bernoulli naive Bayes against the closed-form smoothed posterior."""

import numpy as np
import pytest

from atrisk import ModelSpec, fit
from conftest import make_dataset


def closed_form_posterior_true(features, labels, x):
    """Hand oracle: add-one smoothed Bernoulli posterior for class true."""
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    joint = {}
    for cls in (False, True):
        rows = features[labels == cls] >= 0.5
        n_c = rows.shape[0]
        prior = n_c / len(labels)
        p = prior
        for j in range(features.shape[1]):
            theta = (rows[:, j].sum() + 1.0) / (n_c + 2.0)
            p *= theta if x[j] >= 0.5 else (1.0 - theta)
        joint[cls] = p
    return joint[True] / (joint[False] + joint[True])


def test_perfect_predictor_posterior_above_point_nine():
    # 3 features all equal to the label across 4 rows
    features = np.array([[1., 1., 1.], [1., 1., 1.],
                         [0., 0., 0.], [0., 0., 0.]])
    labels = [True, True, False, False]
    ds = make_dataset(features, labels)
    model = fit(ModelSpec("naive_bayes"), ds)
    proba = model.predict_proba(np.array([[1., 1., 1.]]))
    expected = closed_form_posterior_true(features, labels, [1., 1., 1.])
    assert expected == pytest.approx(27.0 / 28.0)  # (3/4 / 1/4)^3 odds
    assert proba[0, 1] == pytest.approx(expected, abs=1e-12)
    assert proba[0, 1] > 0.9


def test_matches_closed_form_on_random_tables():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n, d = 24, 5
        features = (rng.random((n, d)) < 0.5).astype(float)
        labels = rng.random(n) < 0.5
        labels[:2] = False
        labels[2:4] = True
        ds = make_dataset(features, labels)
        model = fit(ModelSpec("naive_bayes"), ds)
        x = (rng.random(d) < 0.5).astype(float)
        expected = closed_form_posterior_true(features, labels, x)
        proba = model.predict_proba(x[None, :])
        assert proba[0, 1] == pytest.approx(expected, abs=1e-12)


def test_fractional_inputs_thresholded_at_half(smote_train_w3):
    model = fit(ModelSpec("naive_bayes"), smote_train_w3)
    rng = np.random.default_rng(32)
    fractional = rng.random((10, smote_train_w3.n_features))
    binarized = (fractional >= 0.5).astype(float)
    assert np.array_equal(model.predict_proba(fractional),
                          model.predict_proba(binarized))


def test_probabilities_sum_to_one(smote_train_w3):
    model = fit(ModelSpec("naive_bayes"), smote_train_w3)
    proba = model.predict_proba(smote_train_w3.features)
    assert np.abs(proba.sum(axis=1) - 1.0).max() < 1e-9


def test_single_class_rejected():
    ds = make_dataset(np.zeros((3, 2)), [True, True, True])
    with pytest.raises(ValueError, match="both classes"):
        fit(ModelSpec("naive_bayes"), ds)
