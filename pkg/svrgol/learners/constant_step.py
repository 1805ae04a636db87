from __future__ import annotations

import math
from typing import Optional

import numpy as np

from svrgol.exceptions import InvalidArgumentError
from svrgol.learners.base import OnlineLearner
from svrgol.linalg import DenseVector, Vector


class ConstantStepLearner(OnlineLearner):
    """Plain SGD with a fixed step; the non-adaptive baseline of classic SVRG."""

    def __init__(
        self,
        dim: int,
        eta: float,
        diameter: float = math.inf,
        center: Optional[DenseVector] = None,
        initial: Optional[DenseVector] = None,
    ) -> None:
        super().__init__(dim, diameter, center)
        if eta < 0 or not math.isfinite(eta):
            raise InvalidArgumentError(f"eta must be a finite non-negative step, got {eta}")
        self.eta = eta
        self._w = self.center.copy() if initial is None else np.asarray(initial, dtype=np.float64).copy()

    def current(self) -> DenseVector:
        return self._w.copy()

    def step(self, g: Vector) -> None:
        sparse = self._support(g)
        if sparse.nnz:
            self._w[sparse.indices] -= self.eta * sparse.values
        if self.bounded:
            self._w = self._project(self._w)


def constant_sgd_step(learner: ConstantStepLearner, g: Vector) -> ConstantStepLearner:
    learner.step(g)
    return learner
