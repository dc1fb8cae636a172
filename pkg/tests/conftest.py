import pathlib
import sys

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from palinscan import MarkovModel, bohv1_model, iid_model

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> pathlib.Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def bohv1() -> MarkovModel:
    return bohv1_model()


@pytest.fixture(scope="session")
def uniform() -> MarkovModel:
    return iid_model(np.full(4, 0.25))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1729)
