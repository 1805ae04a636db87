from __future__ import annotations

import math
from typing import Optional

import numpy as np

from svrgol.exceptions import InvalidArgumentError
from svrgol.learners.base import OnlineLearner
from svrgol.linalg import DenseVector, Vector

DEFAULT_EPSILON = 1e-12


class AdaGradLearner(OnlineLearner):
    """Diagonal AdaGrad with optional projection onto the D-ball.

    ``eta`` defaults to ``D / sqrt(2)`` for a finite domain and 1 otherwise.
    """

    def __init__(
        self,
        dim: int,
        eta: Optional[float] = None,
        epsilon: float = DEFAULT_EPSILON,
        diameter: float = math.inf,
        center: Optional[DenseVector] = None,
        initial: Optional[DenseVector] = None,
    ) -> None:
        super().__init__(dim, diameter, center)
        if eta is None:
            eta = diameter / math.sqrt(2.0) if self.bounded else 1.0
        if not eta > 0:
            raise InvalidArgumentError(f"eta must be positive, got {eta}")
        if epsilon < 0:
            raise InvalidArgumentError(f"epsilon must be non-negative, got {epsilon}")
        self.eta = eta
        self.epsilon = epsilon
        self.sum_squares = np.zeros(dim)
        self._w = self.center.copy() if initial is None else np.asarray(initial, dtype=np.float64).copy()

    def current(self) -> DenseVector:
        return self._w.copy()

    def step(self, g: Vector) -> None:
        sparse = self._support(g)
        if sparse.nnz == 0:
            return
        idx, values = sparse.indices, sparse.values
        self.sum_squares[idx] += values * values
        self._w[idx] -= self.eta * values / (np.sqrt(self.sum_squares[idx]) + self.epsilon)
        if self.bounded:
            self._w = self._project(self._w)


def adagrad_step(learner: AdaGradLearner, g: Vector) -> AdaGradLearner:
    learner.step(g)
    return learner
