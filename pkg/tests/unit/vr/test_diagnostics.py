import numpy as np

from svrgol.data.synthetic import gen_problem
from svrgol.losses import full_gradient
from svrgol.vr.anchor import AnchorState
from svrgol.vr.batch import batch_gradient
from svrgol.vr.combine import FeatureStats
from svrgol.vr.diagnostics import monte_carlo_variance_check
from tests.conftest import dense_dataset
from tests.oracle import newton_optimum


def exact_anchor(v, data):
    gradient, stats = batch_gradient(v, data)
    return AnchorState(v, gradient, 1, len(data), stats)


class TestMonteCarloVarianceCheck:
    def test_optimum_is_degenerate_pass(self, tiny_dataset):
        w_star = newton_optimum(tiny_dataset)
        report = monte_carlo_variance_check(w_star, exact_anchor(w_star, tiny_dataset), tiny_dataset, 200, w_star, seed=0)
        assert report.passed
        assert report.estimate < 1e-12

    def test_point_mass(self):
        data = dense_dataset([[1.0, -0.5]], [1])
        w_star = np.array([40.0, -20.0])
        w, v = np.array([0.5, 0.2]), np.array([-0.3, 0.1])
        report = monte_carlo_variance_check(w, exact_anchor(v, data), data, 50, w_star, seed=1)
        expected = full_gradient(w, data)
        assert abs(report.estimate - float(expected @ expected)) < 1e-12
        assert report.passed and not report.degenerate

    def test_random_pairs_pass(self):
        train, _, _ = gen_problem(dim=4, n=32, sparsity=3, norm=1.0, seed=5)
        w_star = newton_optimum(train)
        rng = np.random.default_rng(6)
        for _ in range(3):
            w, v = w_star + rng.standard_normal(4), w_star + rng.standard_normal(4)
            report = monte_carlo_variance_check(w, exact_anchor(v, train), train, 10_000, w_star, seed=7)
            assert report.passed, report

    def test_bias_is_measured(self, tiny_dataset):
        w_star = newton_optimum(tiny_dataset)
        v = np.zeros(3)
        gradient, _ = batch_gradient(v, tiny_dataset)
        skewed = AnchorState(v, gradient + 0.1, 1, 2, FeatureStats.from_counts([1, 1, 1], 2))
        report = monte_carlo_variance_check(v, skewed, tiny_dataset, 10, w_star, seed=0)
        assert abs(report.bias_sq - 0.03) < 1e-12
