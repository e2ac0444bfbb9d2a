"""Confusion-matrix metrics, Mann-Whitney AUC, threshold sweeps, and the
cross-validated grid search.

The failing class (label false) is the positive class for reporting
throughout.  A row is predicted failing exactly when P(false) >= threshold,
so the set of rows predicted failing shrinks as the threshold rises and
failing-class recall is non-increasing in the threshold.  Division-by-zero
metrics follow the 0/0 -> 0 convention and are flagged on the report.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass

import numpy as np

from .models import ModelSpec, fit
from .resampling import ResampleConfig, resample

SUMMARY_COLUMNS = ("interval", "model", "precision_false", "recall_false",
                   "f1_false", "accuracy", "auc", "threshold")


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Threshold-tuned evaluation of one model on one real test set."""

    confusion: np.ndarray  # rows = actual (false, true), cols = predicted
    precision_false: float
    precision_true: float
    recall_false: float
    recall_true: float
    f1_false: float
    f1_true: float
    accuracy: float
    auc: float
    threshold: float
    zero_division: tuple = ()

    def to_json_dict(self):
        return {
            "confusion": self.confusion.tolist(),
            "precision_false": self.precision_false,
            "precision_true": self.precision_true,
            "recall_false": self.recall_false,
            "recall_true": self.recall_true,
            "f1_false": self.f1_false,
            "f1_true": self.f1_true,
            "accuracy": self.accuracy,
            "auc": self.auc,
            "threshold": self.threshold,
            "zero_division": list(self.zero_division),
        }

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def summary_row(self, interval, model):
        return {"interval": interval, "model": model,
                "precision_false": self.precision_false,
                "recall_false": self.recall_false,
                "f1_false": self.f1_false,
                "accuracy": self.accuracy,
                "auc": self.auc,
                "threshold": self.threshold}


def _safe_div(num, den, name, hits):
    if den == 0:
        hits.append(name)
        return 0.0
    return num / den


def mann_whitney_auc(scores, positive_mask):
    """P(random positive scores above random negative), ties at 1/2.

    Computed from average ranks; returns None when either group is empty.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positive_mask = np.asarray(positive_mask, dtype=bool)
    n_pos = int(positive_mask.sum())
    n_neg = scores.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    _, inverse, counts = np.unique(scores, return_inverse=True,
                                   return_counts=True)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    avg_rank = starts + (counts + 1) / 2.0  # 1-based, ties averaged
    ranks = avg_rank[inverse]
    u = ranks[positive_mask].sum() - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def evaluate(model, test, threshold):
    """Score a model on a real-only test set at one decision threshold."""
    if test.synthetic_flags.any():
        raise ValueError("test purity violated: test data contains "
                         "synthetic rows")
    if test.n_rows == 0:
        raise ValueError("test set is empty")
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be inside (0,1), got {threshold}")

    p_false = model.predict_proba(test.features)[:, 0]
    predicted_false = p_false >= threshold
    actual_false = ~test.labels

    cm = np.array([
        [int(np.sum(actual_false & predicted_false)),
         int(np.sum(actual_false & ~predicted_false))],
        [int(np.sum(~actual_false & predicted_false)),
         int(np.sum(~actual_false & ~predicted_false))],
    ], dtype=np.int64)

    hits = []
    precision_false = _safe_div(cm[0, 0], cm[0, 0] + cm[1, 0],
                                "precision_false", hits)
    recall_false = _safe_div(cm[0, 0], cm[0, 0] + cm[0, 1],
                             "recall_false", hits)
    precision_true = _safe_div(cm[1, 1], cm[1, 1] + cm[0, 1],
                               "precision_true", hits)
    recall_true = _safe_div(cm[1, 1], cm[1, 1] + cm[1, 0],
                            "recall_true", hits)
    f1_false = _safe_div(2.0 * precision_false * recall_false,
                         precision_false + recall_false, "f1_false", hits)
    f1_true = _safe_div(2.0 * precision_true * recall_true,
                        precision_true + recall_true, "f1_true", hits)
    accuracy = (cm[0, 0] + cm[1, 1]) / test.n_rows

    auc = mann_whitney_auc(p_false, actual_false)
    if auc is None:
        hits.append("auc")
        auc = 0.5

    cm.setflags(write=False)
    return EvalReport(confusion=cm,
                      precision_false=precision_false,
                      precision_true=precision_true,
                      recall_false=recall_false,
                      recall_true=recall_true,
                      f1_false=f1_false,
                      f1_true=f1_true,
                      accuracy=accuracy,
                      auc=auc,
                      threshold=float(threshold),
                      zero_division=tuple(hits))


def sweep_thresholds(model, test, grid):
    """One EvalReport per threshold, identical to single evaluate calls."""
    grid = tuple(grid)
    if not grid:
        raise ValueError("threshold grid is empty")
    return [evaluate(model, test, t) for t in grid]


DEFAULT_THRESHOLDS = (0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70)


@dataclass(frozen=True)
class GridSpec:
    """Search space for the resample + logistic-regression tuning loop."""

    resample_methods: tuple = ("smote",)
    k_neighbors_grid: tuple = (3, 5, 7)
    penalties: tuple = ("l2", "elasticnet")
    c_grid: tuple = (0.01, 0.1, 1.0, 10.0)
    l1_ratios: tuple = (0.0, 0.5, 1.0)
    thresholds: tuple = DEFAULT_THRESHOLDS
    selection_metric: str = "f1_false"
    folds: int = 5
    seed: int = 0

    def __post_init__(self):
        for name in ("resample_methods", "k_neighbors_grid", "penalties",
                     "c_grid", "l1_ratios", "thresholds"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        if any(not 0.0 < t < 1.0 for t in self.thresholds):
            raise ValueError("thresholds must lie strictly inside (0,1)")
        if self.selection_metric not in ("f1_false", "recall_false"):
            raise ValueError(f"selection_metric must be 'f1_false' or "
                             f"'recall_false', got {self.selection_metric!r}")
        if self.folds < 2:
            raise ValueError(f"folds must be >= 2, got {self.folds}")


@dataclass
class GridCell:
    method: str
    k_neighbors: int
    penalty: str
    C: float
    l1_ratio: float  # 0.0 under l2
    threshold: float
    feasible: bool = True
    mean_precision_false: float = float("nan")
    mean_recall_false: float = float("nan")
    mean_f1_false: float = float("nan")
    mean_accuracy: float = float("nan")
    mean_auc: float = float("nan")
    fold_reports: tuple = ()
    rank: int = -1

    def mean_metric(self, name):
        return getattr(self, f"mean_{name}")

    def key(self):
        return (self.method, self.k_neighbors, self.penalty, self.C,
                self.l1_ratio, self.threshold)


@dataclass(frozen=True)
class GridSearchResult:
    cells: tuple           # ranked, feasible first
    audit: dict            # leakage audit counters
    folds: int
    seed: int

    def best(self):
        return self.cells[0]

    def find(self, method, k_neighbors, penalty, C, l1_ratio, threshold):
        target = (method, k_neighbors, penalty, C, l1_ratio, threshold)
        for cell in self.cells:
            if cell.key() == target:
                return cell
        raise KeyError(f"cell {target} not in grid results")

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["rank", "method", "k_neighbors", "penalty",
                             "C", "l1_ratio", "threshold", "feasible",
                             "precision_false", "recall_false", "f1_false",
                             "accuracy", "auc"])
            for cell in self.cells:
                writer.writerow([
                    cell.rank, cell.method, cell.k_neighbors, cell.penalty,
                    repr(cell.C), repr(cell.l1_ratio), repr(cell.threshold),
                    "true" if cell.feasible else "false",
                    repr(cell.mean_precision_false),
                    repr(cell.mean_recall_false),
                    repr(cell.mean_f1_false),
                    repr(cell.mean_accuracy),
                    repr(cell.mean_auc)])


def stratified_fold_indices(labels, folds, seed):
    """Validation index arrays for seeded stratified K-fold."""
    labels = np.asarray(labels, dtype=bool)
    rng = np.random.default_rng(seed)
    out = [[] for _ in range(folds)]
    for label in (False, True):
        members = np.flatnonzero(labels == label)
        perm = members[rng.permutation(members.size)]
        base, extra = divmod(members.size, folds)
        start = 0
        for f in range(folds):
            size = base + (1 if f < extra else 0)
            out[f].extend(perm[start:start + size].tolist())
            start += size
    return [np.sort(np.asarray(f, dtype=np.intp)) for f in out]


def _model_cells(grid):
    cells = []
    for penalty in grid.penalties:
        if penalty == "l2":
            for C in grid.c_grid:
                cells.append((penalty, C, 0.0))
        else:
            for C in grid.c_grid:
                for l1r in grid.l1_ratios:
                    cells.append((penalty, C, l1r))
    return cells


def grid_search(grid, train):
    """Cross-validated search over (resample, model, threshold) cells.

    Resampling is fit inside each fold on the training folds only, so no
    synthetic row can reach a validation fold; the audit counters in the
    result record the check.  Ranking is by mean selection metric, ties
    broken by higher failing recall, smaller C, lower threshold, then the
    remaining cell key for full determinism.
    """
    if train.synthetic_flags.any():
        raise ValueError("grid_search requires real-only training data")
    fold_validation = stratified_fold_indices(train.labels, grid.folds,
                                              grid.seed)
    all_rows = np.arange(train.n_rows, dtype=np.intp)
    audit = {"folds_checked": 0, "synthetic_rows_in_validation": 0,
             "synthetic_rows_in_fit": 0}
    model_cells = _model_cells(grid)
    cells = []

    res_combos = list(itertools.product(grid.resample_methods,
                                        grid.k_neighbors_grid))
    for ri, (method, k) in enumerate(res_combos):
        fold_scores = []  # (penalty, C, l1r) -> list of per-threshold reports
        feasible = True
        for f, val_idx in enumerate(fold_validation):
            fit_idx = np.setdiff1d(all_rows, val_idx, assume_unique=True)
            fit_part = train.subset(fit_idx)
            val_part = train.subset(val_idx)
            audit["folds_checked"] += 1
            audit["synthetic_rows_in_validation"] += \
                int(val_part.synthetic_flags.sum())
            minority = min(fit_part.class_counts())
            if minority < k + 1:
                feasible = False
                break
            seed = int(np.random.SeedSequence(
                grid.seed, spawn_key=(ri, f)).generate_state(1)[0])
            grown = resample(fit_part, ResampleConfig(
                method=method, k_neighbors=k, seed=seed))
            audit["synthetic_rows_in_fit"] += \
                int(grown.dataset.synthetic_flags.sum())
            per_model = {}
            for penalty, C, l1r in model_cells:
                spec = ModelSpec("logreg", penalty=penalty, C=C,
                                 l1_ratio=l1r if penalty == "elasticnet"
                                 else 0.0)
                model = fit(spec, grown.dataset)
                per_model[(penalty, C, l1r)] = {
                    t: evaluate(model, val_part, t) for t in grid.thresholds}
            fold_scores.append(per_model)

        for penalty, C, l1r in model_cells:
            for t in grid.thresholds:
                cell = GridCell(method=method, k_neighbors=k,
                                penalty=penalty, C=C, l1_ratio=l1r,
                                threshold=t, feasible=feasible)
                if feasible:
                    reports = [fs[(penalty, C, l1r)][t] for fs in fold_scores]
                    cell.fold_reports = tuple(reports)
                    cell.mean_precision_false = float(np.mean(
                        [r.precision_false for r in reports]))
                    cell.mean_recall_false = float(np.mean(
                        [r.recall_false for r in reports]))
                    cell.mean_f1_false = float(np.mean(
                        [r.f1_false for r in reports]))
                    cell.mean_accuracy = float(np.mean(
                        [r.accuracy for r in reports]))
                    cell.mean_auc = float(np.mean(
                        [r.auc for r in reports]))
                cells.append(cell)

    def sort_key(cell):
        if not cell.feasible:
            return (1, 0.0, 0.0, 0.0, 0.0, cell.key())
        return (0, -cell.mean_metric(grid.selection_metric),
                -cell.mean_recall_false, cell.C, cell.threshold, cell.key())

    cells.sort(key=sort_key)
    for i, cell in enumerate(cells):
        cell.rank = i + 1
    return GridSearchResult(cells=tuple(cells), audit=audit,
                            folds=grid.folds, seed=grid.seed)


def write_summary_csv(rows, path):
    """Summary CSV mirroring the reporting table columns; extra leading
    columns (e.g. n_features) are carried through when present."""
    if not rows:
        raise ValueError("no summary rows to write")
    columns = list(rows[0].keys())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            out = []
            for c in columns:
                v = row[c]
                out.append(repr(float(v)) if isinstance(v, float) else v)
            writer.writerow(out)
