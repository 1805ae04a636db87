from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, Field

from svrgol.data.dataset import Dataset
from svrgol.data.sampler import Seed, StreamSampler
from svrgol.evaluation import average_loss
from svrgol.exceptions import InvalidArgumentError
from svrgol.linalg import DenseVector
from svrgol.losses import estimate_constants, full_gradient, logistic_grad
from svrgol.vr.anchor import AnchorState
from svrgol.vr.combine import combine_dense

logger = logging.getLogger(__name__)

DEFAULT_SLACK = 1.5
DEGENERATE_FRACTION = 1e-6


class VarianceReport(BaseModel):
    estimate: float = Field(description="Monte-Carlo estimate of the squared norm of the variance-reduced gradient")
    bound: float = Field(description="Smoothness bound built from the suboptimality of w and of the anchor")
    bias_sq: float = Field(description="Squared distance between the batch gradient and the exact anchor gradient")
    slack: float
    n_samples: int
    passed: bool
    degenerate: bool = Field(default=False, description="Estimate negligible compared to G², accepted outright")


def monte_carlo_variance_check(
    w: DenseVector,
    anchor: AnchorState,
    d: Dataset,
    n_samples: int,
    w_star: DenseVector,
    seed: Seed = None,
    slack: float = DEFAULT_SLACK,
) -> VarianceReport:
    """Check the second moment of variance-reduced gradients against its smoothness bound.

    The bound is ``8L (F(w) - F(w*)) + 8L (F(v) - F(w*)) + 2 ‖b‖²`` where ``b`` is the
    batch-gradient error at the anchor, measured with a full pass over ``d``.
    """
    if n_samples < 1:
        raise InvalidArgumentError(f"n_samples must be >= 1, got {n_samples}")
    meta = estimate_constants(d)
    sampler = StreamSampler(d, seed)

    total = 0.0
    for _ in range(n_samples):
        example = sampler.next_sample()
        g = combine_dense(logistic_grad(w, example), logistic_grad(anchor.v, example), anchor.batch_grad)
        total += float(np.dot(g, g))
    estimate = total / n_samples

    bias = anchor.batch_grad - full_gradient(anchor.v, d)
    bias_sq = float(np.dot(bias, bias))
    optimum = average_loss(w_star, d)
    bound = (
        8.0 * meta.L * (average_loss(w, d) - optimum)
        + 8.0 * meta.L * (average_loss(anchor.v, d) - optimum)
        + 2.0 * bias_sq
    )

    degenerate = estimate < DEGENERATE_FRACTION * meta.G * meta.G
    passed = degenerate or estimate <= slack * bound
    logger.info(
        "Variance check: estimate=%s bound=%s bias_sq=%s passed=%s degenerate=%s",
        estimate,
        bound,
        bias_sq,
        passed,
        degenerate,
    )
    return VarianceReport(
        estimate=estimate,
        bound=bound,
        bias_sq=bias_sq,
        slack=slack,
        n_samples=n_samples,
        passed=passed,
        degenerate=degenerate,
    )
