import numpy as np
import pytest

from streamsales.data import transform
from streamsales.models import ModelSpec, fit
from streamsales.synth import default_synthetic_spec, synthesize


@pytest.fixture(scope="session")
def raw_ds():
    """Small raw synthetic dataset shared across read-only tests."""
    return synthesize(default_synthetic_spec(), 120, seed=20240817)


@pytest.fixture(scope="session")
def log_ds(raw_ds):
    return transform(raw_ds)


@pytest.fixture(scope="session")
def small_forest(log_ds):
    spec = ModelSpec("RF", {"n_estimators": 15}, seed=7)
    return fit(spec, log_ds.features, log_ds.target)


@pytest.fixture()
def rng():
    return np.random.default_rng(99)
