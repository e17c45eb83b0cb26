"""Shared fixtures. The expensive trained surrogates are session-scoped."""
import numpy as np
import pytest

from branchline import dataset as ds
from branchline import surrogate as sg
from branchline.microstrip import Substrate

SUB_THIN = Substrate(2.2, 0.0009, 0.508)
SUB_THICK = Substrate(2.2, 0.0009, 1.575)


@pytest.fixture(scope="session")
def folded_tiny_model():
    """Small, quickly trained folded surrogate for smoke tests."""
    full = ds.generate("folded", SUB_THIN, 200, (0.8, 1.7), seed=21)
    train_set, test_set = ds.split(full, 0.2, seed=21)
    model, _ = sg.train(train_set, test_set, sg.TrainConfig(epochs=120, seed=2))
    return model


@pytest.fixture(scope="session")
def folded_protocol():
    """Full folded training protocol: 500 train / 100 test, 500 epochs."""
    full = ds.generate("folded", SUB_THIN, 600, (0.8, 1.7), seed=7)
    train_set, test_set = ds.split(full, 1.0 / 6.0, seed=7)
    model, report = sg.train(train_set, test_set, sg.TrainConfig(epochs=500, seed=11))
    return model, report, train_set, test_set


@pytest.fixture(scope="session")
def cascaded_protocol():
    """Full cascaded training protocol: 3000 train / 300 test, 1000 epochs."""
    full = ds.generate("cascaded", SUB_THICK, 3300, (1.4, 3.2), seed=7)
    train_set, test_set = ds.split(full, 1.0 / 11.0, seed=7)
    model, report = sg.train(train_set, test_set, sg.TrainConfig(epochs=1000, seed=11))
    return model, report, train_set, test_set
