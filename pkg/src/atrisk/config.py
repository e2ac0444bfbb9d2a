"""Pipeline configuration: INI-style key=value files with section headers.

Every file key has a CLI flag counterpart and flags win.  Unknown sections
or keys are rejected by dotted path (e.g. "split.train_fractoin") so config
drift surfaces immediately.  All stage randomness derives from one root
seed plus fixed per-stage offsets, keeping partial reruns consistent with
full pipeline runs.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields

# stage seed = run.seed + offset
SEED_OFFSETS = {
    "simulate": 0,
    "split": 1,
    "resample": 2,
    "train": 3,
    "tune": 4,
    "pca": 5,
}

_SCHEMA = {
    "run": {"seed"},
    "paths": {"cohort", "manifest", "out"},
    "data": {"intervals"},
    "simulate": {"n_students", "fail_rate", "noise", "ability_spread",
                 "difficulty_spread", "labeling"},
    "split": {"train_fraction", "stratified"},
    "resample": {"method", "k_neighbors"},
    "model": None,  # open keys: 'kind' plus kind-specific hyperparameters
    "evaluate": {"threshold", "thresholds"},
    "tune": {"methods", "k_neighbors", "penalties", "c_values", "l1_ratios",
             "thresholds", "folds", "metric"},
    "pca": {"fit_on", "method"},
}


def stage_seed(root_seed, stage):
    return root_seed + SEED_OFFSETS[stage]


def _parse_bool(text, where):
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"{where}: expected 'true' or 'false', got {text!r}")


def _parse_number(text):
    """int when it looks integral, float otherwise, str as fallback."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_config(path):
    """Parse and schema-check a config file into {section: {key: str}}."""
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    parser.optionxform = str  # hyperparameter names are case-sensitive (C)
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh, source=path)
    out = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ValueError(f"unknown config section [{section}] in {path}")
        allowed = _SCHEMA[section]
        for key, value in parser.items(section):
            if allowed is not None and key not in allowed:
                raise ValueError(f"unknown config key {section}.{key} "
                                 f"in {path}")
            out.setdefault(section, {})[key] = value
    return out


@dataclass
class PipelineConfig:
    """Fully resolved settings for every pipeline stage."""

    seed: int = 0
    cohort_path: str = ""        # empty -> simulate instead of ingest
    manifest_path: str = ""
    out_dir: str = "runs/default"
    intervals: tuple = (3, 6, 9)
    # simulate
    n_students: int = 379
    fail_rate: float = 0.15
    noise: float = 0.15
    ability_spread: float = 1.0
    difficulty_spread: float = 1.0
    labeling: str = "quantile"
    # split
    train_fraction: float = 0.8
    stratified: bool = True
    # resample
    resample_method: str = "smote"
    k_neighbors: int = 5
    # model
    model_kind: str = "logreg"
    model_params: dict = field(default_factory=dict)
    train_input: str = "resampled"
    # evaluate
    threshold: float = 0.5
    sweep_thresholds: tuple = ()  # optional grid; empty disables the sweep
    # tune
    tune_methods: tuple = ("smote",)
    tune_k_neighbors: tuple = (3, 5, 7)
    tune_penalties: tuple = ("l2", "elasticnet")
    tune_c_values: tuple = (0.01, 0.1, 1.0, 10.0)
    tune_l1_ratios: tuple = (0.0, 0.5, 1.0)
    tune_thresholds: tuple = (0.30, 0.35, 0.40, 0.45, 0.50,
                              0.55, 0.60, 0.65, 0.70)
    tune_folds: int = 5
    tune_metric: str = "f1_false"
    # pca
    pca_fit_on: str = "union"    # or "real"
    pca_method: str = ""         # empty -> resample_method

    def validate(self):
        if self.train_input not in ("raw", "resampled"):
            raise ValueError(f"model.train_input must be 'raw' or "
                             f"'resampled', got {self.train_input!r}")
        if self.pca_fit_on not in ("union", "real"):
            raise ValueError(f"pca.fit_on must be 'union' or 'real', "
                             f"got {self.pca_fit_on!r}")
        if not self.intervals:
            raise ValueError("data.intervals must be non-empty")
        if any(i < 1 for i in self.intervals):
            raise ValueError("data.intervals entries must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"split.train_fraction must be in (0,1), "
                             f"got {self.train_fraction}")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"evaluate.threshold must be in (0,1), "
                             f"got {self.threshold}")
        if any(not 0.0 < t < 1.0 for t in self.sweep_thresholds):
            raise ValueError("evaluate.thresholds must lie inside (0,1)")
        return self


def _ints(text, where):
    try:
        return tuple(int(p) for p in text.split(",") if p.strip() != "")
    except ValueError:
        raise ValueError(f"{where}: expected comma-separated integers, "
                         f"got {text!r}") from None


def _floats(text, where):
    try:
        return tuple(float(p) for p in text.split(",") if p.strip() != "")
    except ValueError:
        raise ValueError(f"{where}: expected comma-separated numbers, "
                         f"got {text!r}") from None


def _strs(text):
    return tuple(p.strip() for p in text.split(",") if p.strip() != "")


def build_config(config_path=None, overrides=None):
    """Defaults <- config file <- CLI overrides; returns PipelineConfig."""
    cfg = PipelineConfig()
    if config_path:
        raw = read_config(config_path)
        run = raw.get("run", {})
        if "seed" in run:
            cfg.seed = int(run["seed"])
        paths = raw.get("paths", {})
        cfg.cohort_path = paths.get("cohort", cfg.cohort_path)
        cfg.manifest_path = paths.get("manifest", cfg.manifest_path)
        cfg.out_dir = paths.get("out", cfg.out_dir)
        data = raw.get("data", {})
        if "intervals" in data:
            cfg.intervals = _ints(data["intervals"], "data.intervals")
        sim = raw.get("simulate", {})
        if "n_students" in sim:
            cfg.n_students = int(sim["n_students"])
        if "fail_rate" in sim:
            cfg.fail_rate = float(sim["fail_rate"])
        if "noise" in sim:
            cfg.noise = float(sim["noise"])
        if "ability_spread" in sim:
            cfg.ability_spread = float(sim["ability_spread"])
        if "difficulty_spread" in sim:
            cfg.difficulty_spread = float(sim["difficulty_spread"])
        cfg.labeling = sim.get("labeling", cfg.labeling)
        spl = raw.get("split", {})
        if "train_fraction" in spl:
            cfg.train_fraction = float(spl["train_fraction"])
        if "stratified" in spl:
            cfg.stratified = _parse_bool(spl["stratified"],
                                         "split.stratified")
        res = raw.get("resample", {})
        cfg.resample_method = res.get("method", cfg.resample_method)
        if "k_neighbors" in res:
            cfg.k_neighbors = int(res["k_neighbors"])
        model = raw.get("model", {})
        if model:
            cfg.model_kind = model.pop("kind", cfg.model_kind)
            if "train_input" in model:
                cfg.train_input = model.pop("train_input")
            cfg.model_params = {k: _parse_number(v)
                                for k, v in model.items()}
        ev = raw.get("evaluate", {})
        if "threshold" in ev:
            cfg.threshold = float(ev["threshold"])
        if "thresholds" in ev:
            cfg.sweep_thresholds = _floats(ev["thresholds"],
                                           "evaluate.thresholds")
        tune = raw.get("tune", {})
        if "methods" in tune:
            cfg.tune_methods = _strs(tune["methods"])
        if "k_neighbors" in tune:
            cfg.tune_k_neighbors = _ints(tune["k_neighbors"],
                                         "tune.k_neighbors")
        if "penalties" in tune:
            cfg.tune_penalties = _strs(tune["penalties"])
        if "c_values" in tune:
            cfg.tune_c_values = _floats(tune["c_values"], "tune.c_values")
        if "l1_ratios" in tune:
            cfg.tune_l1_ratios = _floats(tune["l1_ratios"],
                                         "tune.l1_ratios")
        if "thresholds" in tune:
            cfg.tune_thresholds = _floats(tune["thresholds"],
                                          "tune.thresholds")
        if "folds" in tune:
            cfg.tune_folds = int(tune["folds"])
        cfg.tune_metric = tune.get("metric", cfg.tune_metric)
        pca = raw.get("pca", {})
        cfg.pca_fit_on = pca.get("fit_on", cfg.pca_fit_on)
        cfg.pca_method = pca.get("method", cfg.pca_method)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if not any(f.name == key for f in fields(PipelineConfig)):
            raise ValueError(f"unknown override {key!r}")
        setattr(cfg, key, value)
    return cfg.validate()
