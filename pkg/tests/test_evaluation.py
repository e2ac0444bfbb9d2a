"""Metrics, AUC, sweeps, and the cross-validated grid search."""

import numpy as np
import pytest

from atrisk import (GridSpec, ModelSpec, evaluate, fit, grid_search,
                    mann_whitney_auc, sweep_thresholds)
from atrisk.evaluation import stratified_fold_indices, write_summary_csv
from conftest import make_dataset
from oracles import auc_pairwise_oracle, metrics_oracle


class FixedModel:
    """Stub exposing a fixed failing-class probability per row."""

    def __init__(self, p_false):
        self.p_false = np.asarray(p_false, dtype=np.float64)

    def predict_proba(self, rows):
        assert rows.shape[0] == len(self.p_false)
        return np.column_stack([self.p_false, 1.0 - self.p_false])


def dataset_for(labels):
    labels = np.asarray(labels, dtype=bool)
    features = np.zeros((len(labels), 2))
    features[:, 0] = labels.astype(float)
    return make_dataset(features, labels)


def report_fields(report):
    return (report.confusion.tolist(), report.precision_false,
            report.recall_false, report.f1_false, report.accuracy,
            report.auc, report.threshold, report.zero_division)


# --- evaluate ----------------------------------------------------------------

def test_definitional_confusion_arithmetic():
    # failing class: TP=7, FP=3, FN=4 plus 7 true negatives
    labels = [False] * 11 + [True] * 10
    p_false = np.array([0.9] * 7 + [0.1] * 4 + [0.9] * 3 + [0.1] * 7)
    ds = dataset_for(labels)
    report = evaluate(FixedModel(p_false), ds, 0.5)
    assert report.confusion.tolist() == [[7, 4], [3, 7]]
    assert report.precision_false == pytest.approx(0.70)
    assert round(report.recall_false, 4) == 0.6364
    assert round(report.f1_false, 4) == 0.6667
    assert report.accuracy == pytest.approx(14 / 21)


def test_confusion_row_sums_equal_class_counts(split_w3):
    train, test = split_w3
    model = fit(ModelSpec("logreg"), train)
    report = evaluate(model, test, 0.5)
    n_fail, n_pass = test.class_counts()
    assert report.confusion.sum() == test.n_rows
    assert report.confusion[0].sum() == n_fail
    assert report.confusion[1].sum() == n_pass


def test_metrics_match_oracle_on_random_vectors():
    rng = np.random.default_rng(61)
    for _ in range(200):
        n = int(rng.integers(4, 80))
        labels = rng.random(n) < rng.uniform(0.2, 0.8)
        labels[0] = False
        labels[1] = True
        p_false = rng.choice([0.1, 0.4, 0.6, 0.9], size=n)
        threshold = float(rng.choice([0.3, 0.5, 0.7]))
        report = evaluate(FixedModel(p_false), dataset_for(labels), threshold)
        cm, precision, recall, f1, accuracy = metrics_oracle(
            ~labels, p_false >= threshold)
        assert np.array_equal(report.confusion, cm)
        assert report.precision_false == precision
        assert report.recall_false == recall
        assert report.f1_false == f1
        assert report.accuracy == accuracy


def test_auc_boundary_cases():
    labels = [False] * 3 + [True] * 4
    perfect = FixedModel([0.9, 0.8, 0.85, 0.1, 0.2, 0.3, 0.15])
    assert evaluate(perfect, dataset_for(labels), 0.5).auc == 1.0
    flat = FixedModel([0.4] * 7)
    assert evaluate(flat, dataset_for(labels), 0.5).auc == 0.5


def test_auc_matches_pairwise_oracle():
    rng = np.random.default_rng(62)
    for _ in range(200):
        n = int(rng.integers(4, 60))
        labels = rng.random(n) < 0.5
        labels[0] = False
        labels[1] = True
        scores = np.round(rng.random(n), 2)  # induce ties
        auc = mann_whitney_auc(scores, ~labels)
        assert auc == pytest.approx(auc_pairwise_oracle(scores, ~labels),
                                    abs=1e-12)


def test_auc_invariant_across_thresholds(split_w3):
    train, test = split_w3
    model = fit(ModelSpec("logreg"), train)
    aucs = {evaluate(model, test, t).auc for t in (0.3, 0.5, 0.7)}
    assert len(aucs) == 1


def test_zero_division_convention_flags():
    labels = [False] * 3 + [True] * 3
    nothing_failing = FixedModel([0.1] * 6)
    report = evaluate(nothing_failing, dataset_for(labels), 0.5)
    assert report.precision_false == 0.0
    assert report.recall_false == 0.0
    assert report.f1_false == 0.0
    assert "precision_false" in report.zero_division
    assert "f1_false" in report.zero_division


def test_single_class_test_flags_auc():
    labels = [True] * 4
    report = evaluate(FixedModel([0.2] * 4), dataset_for(labels), 0.5)
    assert report.auc == 0.5
    assert "auc" in report.zero_division


def test_rejects_synthetic_test_rows():
    features = np.array([[0.0, 1.0], [0.25, 0.5]])
    ds = make_dataset(features, [False, True], synthetic=[False, True])
    with pytest.raises(ValueError, match="test purity"):
        evaluate(FixedModel([0.5, 0.5]), ds, 0.5)


def test_rejects_empty_and_bad_thresholds():
    ds = dataset_for([False, True])
    model = FixedModel([0.9, 0.1])
    for bad in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(ValueError, match="threshold"):
            evaluate(model, ds, bad)


def test_tie_at_threshold_counts_as_failing():
    labels = [False, True]
    report = evaluate(FixedModel([0.5, 0.4]), dataset_for(labels), 0.5)
    assert report.confusion[0, 0] == 1  # p_false == threshold -> failing


# --- sweeps -------------------------------------------------------------------

def test_sweep_matches_single_evaluations(split_w3):
    train, test = split_w3
    model = fit(ModelSpec("logreg"), train)
    grid = (0.45, 0.50)
    reports = sweep_thresholds(model, test, grid)
    for threshold, swept in zip(grid, reports):
        single = evaluate(model, test, threshold)
        assert report_fields(swept) == report_fields(single)


def test_threshold_monotonicity(split_w3):
    train, test = split_w3
    model = fit(ModelSpec("logreg"), train)
    p_false = model.predict_proba(test.features)[:, 0]
    grid = np.linspace(0.05, 0.95, 19)
    previous_set = None
    previous_recall = None
    for report, threshold in zip(sweep_thresholds(model, test, grid), grid):
        predicted = set(np.flatnonzero(p_false >= threshold).tolist())
        if previous_set is not None:
            assert predicted <= previous_set
            assert report.recall_false <= previous_recall
        previous_set = predicted
        previous_recall = report.recall_false


def test_threshold_above_every_score_gives_zero_recall(split_w3):
    train, test = split_w3
    model = fit(ModelSpec("logreg"), train)
    p_false = model.predict_proba(test.features)[:, 0]
    above = min(float(p_false.max()) + 0.01, 0.999)
    report = evaluate(model, test, above)
    assert report.recall_false == 0.0
    assert report.confusion[:, 0].sum() == 0


def test_empty_sweep_rejected(split_w3):
    train, test = split_w3
    model = fit(ModelSpec("logreg"), train)
    with pytest.raises(ValueError, match="empty"):
        sweep_thresholds(model, test, ())


# --- stratified folds ---------------------------------------------------------

def test_stratified_folds_partition_and_balance():
    rng = np.random.default_rng(63)
    labels = rng.random(97) < 0.2
    labels[:2] = False
    labels[2:4] = True
    folds = stratified_fold_indices(labels, 5, seed=3)
    together = np.concatenate(folds)
    assert sorted(together.tolist()) == list(range(97))
    n_false = int((~labels).sum())
    for fold in folds:
        fold_false = int((~labels[fold]).sum())
        assert abs(fold_false - n_false / 5) < 1.0


# --- grid search ----------------------------------------------------------------

def tiny_grid(**kw):
    defaults = dict(resample_methods=("smote",), k_neighbors_grid=(5,),
                    penalties=("elasticnet",), c_grid=(0.01,),
                    l1_ratios=(0.5,), thresholds=(0.50,), folds=3, seed=0)
    defaults.update(kw)
    return GridSpec(**defaults)


def test_single_cell_grid_ranks_first(split_w3):
    train, _ = split_w3
    result = grid_search(tiny_grid(), train)
    assert len(result.cells) == 1
    best = result.best()
    assert best.rank == 1
    assert best.feasible
    assert (best.method, best.k_neighbors) == ("smote", 5)
    assert (best.penalty, best.C, best.l1_ratio) == ("elasticnet", 0.01, 0.5)
    assert best.threshold == 0.50
    assert 0.0 <= best.mean_f1_false <= 1.0


def test_winning_cell_evaluable_in_wider_grid(split_w3):
    train, _ = split_w3
    grid = tiny_grid(c_grid=(0.01, 1.0), thresholds=(0.45, 0.50))
    result = grid_search(grid, train)
    cell = result.find("smote", 5, "elasticnet", 0.01, 0.5, 0.50)
    assert cell.feasible
    assert not np.isnan(cell.mean_recall_false)


def test_grid_search_deterministic(split_w3):
    train, _ = split_w3
    grid = tiny_grid(penalties=("l2", "elasticnet"), c_grid=(0.01, 1.0),
                     thresholds=(0.4, 0.5))
    a = grid_search(grid, train)
    b = grid_search(grid, train)
    assert [c.key() for c in a.cells] == [c.key() for c in b.cells]
    assert [c.mean_f1_false for c in a.cells] == \
        [c.mean_f1_false for c in b.cells]
    assert a.audit == b.audit


def test_grid_search_leakage_audit(split_w3):
    train, _ = split_w3
    result = grid_search(tiny_grid(), train)
    assert result.audit["folds_checked"] == 3
    assert result.audit["synthetic_rows_in_validation"] == 0
    assert result.audit["synthetic_rows_in_fit"] > 0


def test_grid_search_rejects_synthetic_training_rows(smote_train_w3):
    with pytest.raises(ValueError, match="real-only"):
        grid_search(tiny_grid(), smote_train_w3)


def test_grid_search_marks_infeasible_cells():
    rng = np.random.default_rng(64)
    features = (rng.random((40, 4)) < 0.5).astype(float)
    labels = np.ones(40, dtype=bool)
    labels[:6] = False  # 6 minority rows over 3 folds -> 4 per fit part
    ds = make_dataset(features, labels)
    grid = tiny_grid(k_neighbors_grid=(3, 5), penalties=("l2",),
                     l1_ratios=(0.0,), folds=3)
    result = grid_search(grid, ds)
    by_k = {c.k_neighbors: c for c in result.cells}
    assert by_k[3].feasible          # needs 4 minority rows per fit part
    assert not by_k[5].feasible      # needs 6, only 4 available
    assert by_k[5].rank > by_k[3].rank
    assert np.isnan(by_k[5].mean_f1_false)


def test_grid_ranking_tie_breaks_prefer_smaller_c(split_w3):
    train, _ = split_w3
    # duplicate cells except for C; if metrics tie, smaller C must rank higher
    grid = tiny_grid(penalties=("l2",), l1_ratios=(0.0,),
                     c_grid=(10.0, 1.0), thresholds=(0.5,))
    result = grid_search(grid, train)
    cells = result.cells
    if cells[0].mean_f1_false == cells[1].mean_f1_false and \
            cells[0].mean_recall_false == cells[1].mean_recall_false:
        assert cells[0].C < cells[1].C


def test_grid_spec_validation():
    with pytest.raises(ValueError, match="folds"):
        GridSpec(folds=1)
    with pytest.raises(ValueError, match="thresholds"):
        GridSpec(thresholds=(0.0, 0.5))
    with pytest.raises(ValueError, match="selection_metric"):
        GridSpec(selection_metric="accuracy")
    with pytest.raises(ValueError, match="non-empty"):
        GridSpec(c_grid=())


# --- summary csv ---------------------------------------------------------------

def test_summary_csv_columns(tmp_path, split_w3):
    train, test = split_w3
    model = fit(ModelSpec("logreg"), train)
    report = evaluate(model, test, 0.5)
    path = tmp_path / "summary.csv"
    write_summary_csv([report.summary_row(3, "logreg")], path)
    lines = path.read_text().splitlines()
    assert lines[0] == ("interval,model,precision_false,recall_false,"
                        "f1_false,accuracy,auc,threshold")
    assert lines[1].startswith("3,logreg,")
