"""CART decision tree (Gini impurity) and bagged random forest.

Splits are single-feature thresholds at midpoints between distinct sorted
values, chosen to minimise the weighted child Gini via the kernel split
scan.  Ties break toward the lowest feature index, then the lowest
threshold.  Impure nodes accept zero-gain splits (needed for XOR-like
layouts), so a fully grown tree reaches training accuracy 1.0 whenever no
duplicate feature rows carry different labels.
"""

from __future__ import annotations

import math

import numpy as np

from .. import kernels
from .base import TrainedModel

_NO_FEATURE = -1


class _TreeArrays:
    """Flat preorder tree storage (JSON-friendly)."""

    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.probs = []  # per node: (p_false, p_true)

    def add_node(self):
        self.feature.append(_NO_FEATURE)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.probs.append((0.0, 0.0))
        return len(self.feature) - 1


def _build_tree(X, y, max_depth, min_samples_split, rng=None,
                max_features=None):
    """Grow a tree on y (bool); returns _TreeArrays.

    rng/max_features enable the forest's per-split feature subsampling; the
    candidate features are always scanned in ascending index order so the
    tie rule is independent of sampling order.
    """
    tree = _TreeArrays()
    d = X.shape[1]

    def grow(rows, depth):
        node = tree.add_node()
        n = rows.size
        n_true = int(y[rows].sum())
        tree.probs[node] = ((n - n_true) / n, n_true / n)
        pure = n_true == 0 or n_true == n
        if pure or n < min_samples_split or \
                (max_depth is not None and depth >= max_depth):
            return node
        if max_features is not None and max_features < d:
            candidates = np.sort(rng.choice(d, size=max_features,
                                            replace=False))
        else:
            candidates = range(d)
        best = (np.inf, 0.0, -1)
        labels = y[rows].astype(np.uint8)
        for j in candidates:
            values = X[rows, j]
            order = np.argsort(values, kind="stable")
            found, impurity, threshold = kernels.split_scan(values[order],
                                                            labels[order])
            if found and impurity < best[0]:
                best = (impurity, threshold, j)
        if best[2] < 0:
            return node  # all candidate features constant here
        _, threshold, j = best
        tree.feature[node] = int(j)
        tree.threshold[node] = float(threshold)
        go_left = X[rows, j] <= threshold
        tree.left[node] = grow(rows[go_left], depth + 1)
        tree.right[node] = grow(rows[~go_left], depth + 1)
        return node

    grow(np.arange(X.shape[0], dtype=np.intp), 0)
    return tree


def _tree_proba(tree, rows):
    out = np.empty((rows.shape[0], 2))
    feature = tree.feature
    threshold = tree.threshold
    left, right, probs = tree.left, tree.right, tree.probs
    for i in range(rows.shape[0]):
        node = 0
        while feature[node] != _NO_FEATURE:
            if rows[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = probs[node]
    return out


def _tree_to_state(tree):
    return {"feature": list(tree.feature),
            "threshold": list(tree.threshold),
            "left": list(tree.left),
            "right": list(tree.right),
            "probs": [list(p) for p in tree.probs]}


def _tree_from_state(state):
    tree = _TreeArrays()
    tree.feature = [int(v) for v in state["feature"]]
    tree.threshold = [float(v) for v in state["threshold"]]
    tree.left = [int(v) for v in state["left"]]
    tree.right = [int(v) for v in state["right"]]
    tree.probs = [tuple(p) for p in state["probs"]]
    return tree


class DecisionTreeModel(TrainedModel):
    def __init__(self, spec, tree, n_features):
        super().__init__(spec, n_features=n_features)
        self.tree = tree

    def _proba(self, rows):
        return _tree_proba(self.tree, rows)

    def _state(self):
        return {"tree": _tree_to_state(self.tree)}

    @classmethod
    def from_state(cls, spec, state, n_features, non_converged):
        return cls(spec, _tree_from_state(state["tree"]), n_features)

    @property
    def n_nodes(self):
        return len(self.tree.feature)


class RandomForestModel(TrainedModel):
    def __init__(self, spec, trees, n_features):
        super().__init__(spec, n_features=n_features)
        self.trees = trees

    def _proba(self, rows):
        stacked = np.stack([_tree_proba(t, rows) for t in self.trees])
        return stacked.mean(axis=0)

    def member_probas(self, rows):
        """Per-tree probabilities, for the mean-exactness check."""
        return [_tree_proba(t, rows) for t in self.trees]

    def _state(self):
        return {"trees": [_tree_to_state(t) for t in self.trees]}

    @classmethod
    def from_state(cls, spec, state, n_features, non_converged):
        trees = [_tree_from_state(t) for t in state["trees"]]
        return cls(spec, trees, n_features)


def fit_decision_tree(spec, train):
    p = spec.params
    tree = _build_tree(train.features, train.labels,
                       max_depth=p["max_depth"],
                       min_samples_split=p["min_samples_split"])
    return DecisionTreeModel(spec, tree, n_features=train.n_features)


def fit_random_forest(spec, train):
    p = spec.params
    d = train.n_features
    if p["max_features"] == "sqrt":
        max_features = max(1, int(math.sqrt(d)))
    else:
        max_features = min(p["max_features"], d)
    n = train.n_rows
    trees = []
    for child in np.random.SeedSequence(p["seed"]).spawn(p["n_trees"]):
        rng = np.random.default_rng(child)
        bootstrap = rng.integers(0, n, size=n)
        trees.append(_build_tree(train.features[bootstrap],
                                 train.labels[bootstrap],
                                 max_depth=p["max_depth"],
                                 min_samples_split=p["min_samples_split"],
                                 rng=rng, max_features=max_features))
    return RandomForestModel(spec, trees, n_features=d)
