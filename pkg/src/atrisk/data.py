"""Cohort records, one-hot task encoding, and seeded train/test splits.

File formats
------------
Cohort CSV:   header ``student_id,cohort,passed,right_answers,wrong_answers``;
              ``passed`` is ``true``/``false``; the two list fields hold
              pipe-separated task names and may be empty.
Manifest CSV: header ``task,week``, one row per task.
Dataset CSV:  one column per feature (named), then ``label`` and ``synthetic``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


def _parse_bool(text):
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"expected 'true' or 'false', got {text!r}")


def _format_value(v):
    # integral floats print without the trailing .0 so 0/1 matrices stay tidy
    f = float(v)
    return str(int(f)) if f == int(f) else repr(f)


@dataclass(frozen=True)
class TaskId:
    """A formative task: unique name plus the teaching week it belongs to."""

    name: str
    week: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("task name must be non-empty")
        if self.week < 1:
            raise ValueError(f"task {self.name!r}: week must be >= 1, "
                             f"got {self.week}")


class TaskManifest:
    """Ordered task collection; ordering is lexicographic by task name."""

    def __init__(self, tasks):
        ordered = tuple(sorted(tasks, key=lambda t: t.name))
        names = [t.name for t in ordered]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate task names in manifest: {dupes}")
        self._tasks = ordered
        self._by_name = {t.name: t for t in ordered}

    @property
    def tasks(self):
        return self._tasks

    def __len__(self):
        return len(self._tasks)

    def __contains__(self, name):
        return name in self._by_name

    def names(self):
        return tuple(t.name for t in self._tasks)

    def through_week(self, max_week):
        """Tasks with week <= max_week, in manifest order."""
        return tuple(t for t in self._tasks if t.week <= max_week)

    def count_through_week(self, max_week):
        return len(self.through_week(max_week))

    @classmethod
    def from_csv(cls, path):
        tasks = []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["task", "week"]:
                raise ValueError(f"{path}: expected header 'task,week', "
                                 f"got {header}")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 2 fields, "
                                     f"got {len(row)}")
                try:
                    week = int(row[1])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: week must be an "
                                     f"integer, got {row[1]!r}") from None
                tasks.append(TaskId(name=row[0], week=week))
        return cls(tasks)

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["task", "week"])
            for task in self._tasks:
                writer.writerow([task.name, task.week])


@dataclass(frozen=True)
class StudentRecord:
    """One student's task outcomes plus the summative pass/fail label."""

    student_id: str
    cohort: str
    right_answers: tuple
    wrong_answers: tuple
    passed: bool

    def validate_against(self, manifest):
        overlap = set(self.right_answers) & set(self.wrong_answers)
        if overlap:
            raise ValueError(
                f"student {self.student_id!r}: task(s) listed as both right "
                f"and wrong: {sorted(overlap)}")
        unknown = [n for n in (*self.right_answers, *self.wrong_answers)
                   if n not in manifest]
        if unknown:
            raise ValueError(
                f"student {self.student_id!r}: unknown task name(s): "
                f"{sorted(set(unknown))}")


class LabeledDataset:
    """Feature matrix with labels, column names, and synthetic-row markers.

    Real (non-synthetic) rows must contain only exact 0/1 values; synthetic
    rows produced by the oversamplers may be fractional.  Arrays are
    write-protected after construction, so instances are safe to share
    across threads.
    """

    def __init__(self, features, labels, feature_names, synthetic_flags=None):
        features = np.array(features, dtype=np.float64, copy=True)
        labels = np.array(labels, dtype=bool, copy=True)
        if features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        n = features.shape[0]
        if labels.shape != (n,):
            raise ValueError(f"labels length {labels.shape} does not match "
                             f"{n} rows")
        names = tuple(feature_names)
        if len(names) != features.shape[1]:
            raise ValueError(f"{len(names)} feature names for "
                             f"{features.shape[1]} columns")
        if synthetic_flags is None:
            flags = np.zeros(n, dtype=bool)
        else:
            flags = np.array(synthetic_flags, dtype=bool, copy=True)
            if flags.shape != (n,):
                raise ValueError("synthetic_flags length does not match rows")
        if not np.isfinite(features).all():
            raise ValueError("features must be finite")
        real = features[~flags]
        if real.size and not (((real == 0.0) | (real == 1.0)).all()):
            raise ValueError("real rows must contain only exact 0/1 values")
        features.setflags(write=False)
        labels.setflags(write=False)
        flags.setflags(write=False)
        self.features = features
        self.labels = labels
        self.feature_names = names
        self.synthetic_flags = flags

    @property
    def n_rows(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def class_counts(self):
        """(failing, passing) row counts."""
        n_true = int(self.labels.sum())
        return self.n_rows - n_true, n_true

    def subset(self, rows):
        rows = np.asarray(rows, dtype=np.intp)
        return LabeledDataset(self.features[rows], self.labels[rows],
                              self.feature_names, self.synthetic_flags[rows])

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([*self.feature_names, "label", "synthetic"])
            for i in range(self.n_rows):
                row = [_format_value(v) for v in self.features[i]]
                row.append("true" if self.labels[i] else "false")
                row.append("true" if self.synthetic_flags[i] else "false")
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or len(header) < 3 or \
                    header[-2:] != ["label", "synthetic"]:
                raise ValueError(f"{path}: expected feature columns followed "
                                 f"by 'label,synthetic'")
            names = header[:-2]
            features, labels, flags = [], [], []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise ValueError(f"{path}:{lineno}: expected "
                                     f"{len(header)} fields, got {len(row)}")
                try:
                    features.append([float(v) for v in row[:-2]])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: non-numeric feature "
                                     f"value") from None
                labels.append(_parse_bool(row[-2]))
                flags.append(_parse_bool(row[-1]))
        matrix = np.array(features, dtype=np.float64) if features else \
            np.empty((0, len(names)), dtype=np.float64)
        return cls(matrix, labels, names, flags)


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split parameters; stratified by default."""

    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0,1), got "
                             f"{self.train_fraction}")


def load_cohort(path, manifest):
    """Read and validate a cohort CSV against a manifest.

    Order is preserved from the file.  Unknown task names, duplicated
    student ids, overlapping right/wrong lists, and malformed fields are all
    rejected with the offending line identified.
    """
    expected = ["student_id", "cohort", "passed",
                "right_answers", "wrong_answers"]
    records = []
    seen = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            raise ValueError(f"{path}: expected header "
                             f"{','.join(expected)!r}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 fields, "
                                 f"got {len(row)}")
            student_id, cohort, passed_text, right_text, wrong_text = row
            try:
                passed = _parse_bool(passed_text)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad 'passed' field: "
                                 f"{exc}") from None
            if student_id in seen:
                raise ValueError(
                    f"{path}:{lineno}: duplicate student_id "
                    f"{student_id!r} (first seen on line {seen[student_id]})")
            seen[student_id] = lineno
            record = StudentRecord(
                student_id=student_id,
                cohort=cohort,
                right_answers=tuple(n for n in right_text.split("|") if n),
                wrong_answers=tuple(n for n in wrong_text.split("|") if n),
                passed=passed,
            )
            try:
                record.validate_against(manifest)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            records.append(record)
    return records


def save_cohort(records, path):
    """Write records back out in the cohort CSV format."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["student_id", "cohort", "passed",
                         "right_answers", "wrong_answers"])
        for r in records:
            writer.writerow([r.student_id, r.cohort,
                             "true" if r.passed else "false",
                             "|".join(r.right_answers),
                             "|".join(r.wrong_answers)])


def encode(records, manifest, max_week):
    """One-hot encode records over the manifest tasks with week <= max_week.

    A cell is 1 exactly when the task appears in the student's right_answers;
    unattempted and wrong tasks both encode to 0.
    """
    if max_week < 1:
        raise ValueError(f"max_week must be >= 1, got {max_week}")
    columns = manifest.through_week(max_week)
    if not columns:
        raise ValueError(f"no manifest tasks fall within weeks 1..{max_week}")
    names = tuple(t.name for t in columns)
    matrix = np.zeros((len(records), len(columns)), dtype=np.float64)
    labels = np.empty(len(records), dtype=bool)
    for i, record in enumerate(records):
        right = set(record.right_answers)
        for j, name in enumerate(names):
            if name in right:
                matrix[i, j] = 1.0
        labels[i] = record.passed
    return LabeledDataset(matrix, labels, names)


def _stratified_train_counts(class_sizes, train_fraction, n_train_total):
    """Per-class train-row counts: floors, then largest-remainder top-up."""
    base, remainders = {}, {}
    for label, size in class_sizes.items():
        exact = train_fraction * size
        base[label] = int(np.floor(exact))
        remainders[label] = exact - base[label]
    short = n_train_total - sum(base.values())
    # deterministic: biggest remainder first, then bigger class, then label
    order = sorted(class_sizes,
                   key=lambda c: (-remainders[c], -class_sizes[c], c))
    i = 0
    while short > 0:
        base[order[i % len(order)]] += 1
        short -= 1
        i += 1
    return base


def split(data, spec):
    """Deterministic seeded train/test split of a dataset.

    Total train size is floor(train_fraction * n).  In stratified mode the
    per-class allocation keeps each class's train share within one row of
    train_fraction; both parts preserve the original row order.
    """
    n = data.n_rows
    if n < 2:
        raise ValueError("need at least 2 rows to split")
    rng = np.random.default_rng(spec.seed)
    n_train = int(np.floor(spec.train_fraction * n))
    if spec.stratified:
        class_sizes = {}
        for label in (False, True):
            class_sizes[label] = int((data.labels == label).sum())
            if class_sizes[label] < 2:
                raise ValueError(
                    f"stratified split needs >= 2 rows of class "
                    f"{'true' if label else 'false'}, "
                    f"got {class_sizes[label]}")
        counts = _stratified_train_counts(class_sizes, spec.train_fraction,
                                          n_train)
        train_idx = []
        for label in (False, True):
            members = np.flatnonzero(data.labels == label)
            picked = rng.permutation(len(members))[:counts[label]]
            train_idx.append(members[picked])
        train_mask = np.zeros(n, dtype=bool)
        train_mask[np.concatenate(train_idx)] = True
    else:
        picked = rng.permutation(n)[:n_train]
        train_mask = np.zeros(n, dtype=bool)
        train_mask[picked] = True
    train_rows = np.flatnonzero(train_mask)
    test_rows = np.flatnonzero(~train_mask)
    return data.subset(train_rows), data.subset(test_rows)
