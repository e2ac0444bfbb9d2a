import numpy as np
import pytest

from atrisk import (LabeledDataset, ResampleConfig, SimConfig, SplitSpec,
                    encode, simulate, smote, split)


@pytest.fixture(scope="session")
def default_cohort():
    """One default simulated cohort, shared across the suite."""
    records, manifest = simulate(SimConfig(seed=0))
    return records, manifest


@pytest.fixture(scope="session")
def dataset_w3(default_cohort):
    records, manifest = default_cohort
    return encode(records, manifest, 3)


@pytest.fixture(scope="session")
def dataset_w9(default_cohort):
    records, manifest = default_cohort
    return encode(records, manifest, 9)


@pytest.fixture(scope="session")
def split_w3(dataset_w3):
    return split(dataset_w3, SplitSpec(train_fraction=0.8, seed=1))


@pytest.fixture(scope="session")
def split_w9(dataset_w9):
    return split(dataset_w9, SplitSpec(train_fraction=0.8, seed=1))


@pytest.fixture(scope="session")
def smote_train_w3(split_w3):
    train, _ = split_w3
    return smote(train, ResampleConfig(method="smote", k_neighbors=5,
                                       seed=11)).dataset


def make_dataset(features, labels, synthetic=None):
    features = np.asarray(features, dtype=np.float64)
    names = tuple(f"f{j}" for j in range(features.shape[1]))
    return LabeledDataset(features, labels, names, synthetic)


def random_binary_dataset(rng, n, d, p_true=0.5):
    features = (rng.random((n, d)) < 0.5).astype(np.float64)
    labels = rng.random(n) < p_true
    # ensure both classes are present with two rows each
    labels[:2] = False
    labels[2:4] = True
    return make_dataset(features, labels)
