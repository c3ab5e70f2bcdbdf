import numpy as np
import pytest

from pencillab.ensembles import make_stream


@pytest.fixture
def stream():
    return make_stream(1234, 7)


@pytest.fixture
def gen():
    return np.random.default_rng(99)


def mean_se(x):
    x = np.asarray(x, dtype=float)
    return x.mean(), x.std(ddof=1) / np.sqrt(len(x))
