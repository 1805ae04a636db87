import pytest

from svrgol.data.synthetic import gen_problem
from tests.oracle import newton_optimum


@pytest.fixture(scope="module")
def problem_with_optimum():
    cache = {}

    def factory(dim: int, n: int, seed: int, sparsity: int = 5, norm: float = 3.0):
        key = (dim, n, seed, sparsity, norm)
        if key not in cache:
            train, _, _ = gen_problem(dim, n, sparsity, norm, seed)
            cache[key] = (train, newton_optimum(train))
        return cache[key]

    return factory
