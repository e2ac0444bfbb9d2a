"""Logistic regression with l2 or elasticnet penalty.

Minimises

    sum_i log(1 + exp(-y_i (w.x_i + b)))
        + (1/C) * (l1_ratio * |w|_1 + (1 - l1_ratio)/2 * |w|_2^2)

with y in {-1, +1} and the intercept unpenalised, by proximal gradient
descent: a plain gradient step on the smooth part (loss + l2) at step 1/L,
then soft-thresholding of the weights for the l1 part.  The fixed step
1/L with L = 0.25 * sigma_max(X~)^2 + (1 - l1_ratio)/C guarantees the
objective never increases.
"""

from __future__ import annotations

import numpy as np

from .base import TrainedModel, check_training_labels


def sigmoid(z):
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _soft_threshold(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def smooth_objective(X, y, w, b, C, l1_ratio):
    """Differentiable part of the objective: logistic loss plus l2 term."""
    l2 = (1.0 - l1_ratio) / C
    margins = y * (X @ w + b)
    return np.logaddexp(0.0, -margins).sum() + 0.5 * l2 * (w @ w)


def smooth_gradient(X, y, w, b, C, l1_ratio):
    """Analytic gradient of smooth_objective; returns (grad_w, grad_b)."""
    l2 = (1.0 - l1_ratio) / C
    margins = y * (X @ w + b)
    coef = y * sigmoid(-margins)
    return -(X.T @ coef) + l2 * w, -coef.sum()


def fit_logistic_raw(X, y, C, l1_ratio, tolerance, max_iterations):
    """Core solver on y in {-1,+1}; returns (w, b, history, converged).

    Proximal gradient with backtracking: each iteration takes a gradient
    step on the smooth part (loss + l2), soft-thresholds the weights for
    the l1 part, and halves the step until the quadratic majorisation
    holds, which makes the full objective non-increasing by construction.
    history[k] is the objective after k steps (history[0] is the start).
    """
    n, d = X.shape
    l1 = l1_ratio / C
    l2 = (1.0 - l1_ratio) / C

    def smooth(w, b):
        return smooth_objective(X, y, w, b, C, l1_ratio)

    def objective_from_smooth(s, w):
        return s + l1 * np.abs(w).sum()

    # Lipschitz bound via the gram matrix of [X, 1]; backtracking can only
    # shrink below it, so start a factor above and let growth probe upward
    xt_gram_top = float(np.linalg.eigvalsh(
        np.hstack([X, np.ones((n, 1))]).T
        @ np.hstack([X, np.ones((n, 1))]))[-1])
    step = 8.0 / (0.25 * xt_gram_top + l2)

    w = np.zeros(d)
    b = 0.0
    s_val = smooth(w, b)
    history = [objective_from_smooth(s_val, w)]
    converged = False
    for _ in range(max_iterations):
        grad_w, grad_b = smooth_gradient(X, y, w, b, C, l1_ratio)
        previous = history[-1]
        stalled = False
        while True:
            w_new = _soft_threshold(w - step * grad_w, step * l1)
            b_new = b - step * grad_b
            dw = w_new - w
            db = b_new - b
            s_new = smooth(w_new, b_new)
            bound = s_val + grad_w @ dw + grad_b * db \
                + (dw @ dw + db * db) / (2.0 * step)
            current = objective_from_smooth(s_new, w_new)
            if s_new <= bound and current <= previous:
                break
            if step < 1e-18:
                stalled = True  # no descent step exists at fp precision
                break
            step *= 0.5
        if stalled:
            converged = True
            break
        w, b, s_val = w_new, b_new, s_new
        history.append(current)
        if previous - current < tolerance * max(1.0, abs(previous)):
            converged = True
            break
        step *= 1.25  # probe a larger step next round
    return w, b, np.asarray(history), converged


class LogisticModel(TrainedModel):
    def __init__(self, spec, weights, intercept, objective_history,
                 non_converged):
        super().__init__(spec, n_features=len(weights),
                         non_converged=non_converged)
        weights = np.asarray(weights, dtype=np.float64)
        weights.setflags(write=False)
        self.weights = weights
        self.intercept = float(intercept)
        self.objective_history = objective_history

    def _proba(self, rows):
        p_true = sigmoid(rows @ self.weights + self.intercept)
        return np.column_stack([1.0 - p_true, p_true])

    def _state(self):
        return {"weights": self.weights.tolist(),
                "intercept": self.intercept}

    @classmethod
    def from_state(cls, spec, state, n_features, non_converged):
        return cls(spec, np.asarray(state["weights"]), state["intercept"],
                   objective_history=None, non_converged=non_converged)


def fit_logistic(spec, train):
    check_training_labels(spec, train.labels)
    p = spec.params
    l1_ratio = p["l1_ratio"] if p["penalty"] == "elasticnet" else 0.0
    y = np.where(train.labels, 1.0, -1.0)
    w, b, history, converged = fit_logistic_raw(
        train.features, y, C=p["C"], l1_ratio=l1_ratio,
        tolerance=p["tolerance"], max_iterations=p["max_iterations"])
    return LogisticModel(spec, w, b, history, non_converged=not converged)
