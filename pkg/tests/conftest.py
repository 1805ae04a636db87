import numpy as np
import pytest
import scipy.sparse as sp

from svrgol.cli.config import RunConfig
from svrgol.data.dataset import Dataset
from svrgol.data.synthetic import gen_problem


@pytest.fixture(autouse=True)
def _clean_environment(monkeypatch):
    # RunConfig reads SVRGOL_* variables; tests must not inherit them from the shell
    import os

    for key in list(os.environ):
        if key.upper().startswith("SVRGOL_"):
            monkeypatch.delenv(key, raising=False)


def dense_dataset(rows, labels) -> Dataset:
    return Dataset(sp.csr_matrix(np.asarray(rows, dtype=np.float64)), labels)


@pytest.fixture
def tiny_dataset() -> Dataset:
    # every row appears with both labels and the rows span R^3, so the optimum is finite
    return dense_dataset(
        [
            [1.0, 0.0, 2.0],
            [1.0, 0.0, 2.0],
            [1.0, 0.0, 2.0],
            [0.0, -1.0, 0.5],
            [0.0, -1.0, 0.5],
            [0.5, 1.0, 0.0],
            [0.5, 1.0, 0.0],
            [0.5, 1.0, 0.0],
        ],
        [1, -1, 1, 1, -1, -1, 1, -1],
    )


@pytest.fixture
def small_problem():
    train, test, w_true = gen_problem(dim=8, n=256, sparsity=3, norm=2.0, seed=11, n_test=64)
    return train, test, w_true


@pytest.fixture
def make_config():
    def factory(**overrides) -> RunConfig:
        values = {"synthetic": "dim=8,n=256"}
        values.update(overrides)
        return RunConfig(**values)

    return factory
