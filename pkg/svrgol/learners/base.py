from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from svrgol.exceptions import InvalidArgumentError
from svrgol.linalg import DenseVector, SparseVector, Vector, check_dims, dimension_of, l2_norm, to_dense


def project_ball(w: DenseVector, center: DenseVector, radius: float) -> DenseVector:
    """Euclidean projection of ``w`` onto the ball ``‖x - center‖ <= radius``."""
    if not radius > 0:
        raise InvalidArgumentError(f"radius must be positive, got {radius}")
    check_dims(w, center)
    offset = w - center
    distance = l2_norm(offset)
    if distance <= radius:
        return w
    return center + (radius / distance) * offset


def bias_compensate(g: Vector, w: DenseVector, B: float) -> Vector:
    """``g + B * w / ‖w‖``, with ``w / ‖w‖`` taken as zero at the origin."""
    if B < 0:
        raise InvalidArgumentError(f"Bias bound must be non-negative, got {B}")
    check_dims(g, w)
    norm = l2_norm(w)
    if B == 0 or norm == 0:
        return g
    return to_dense(g) + (B / norm) * w


class OnlineLearner(ABC):
    """Online learner contract: ``current()`` plays ``w_t``, ``step(g_t)`` receives the gradient.

    With a finite ``diameter`` every played point lies in the ball of radius
    ``diameter / 2`` around ``center``.
    """

    def __init__(
        self,
        dim: int,
        diameter: float = math.inf,
        center: Optional[DenseVector] = None,
    ) -> None:
        if dim < 1:
            raise InvalidArgumentError(f"dim must be >= 1, got {dim}")
        if not diameter > 0:
            raise InvalidArgumentError(f"diameter must be positive, got {diameter}")
        self.dim = dim
        self.diameter = diameter
        self.center = np.zeros(dim) if center is None else np.asarray(center, dtype=np.float64).copy()
        check_dims(self.center, np.zeros(dim))
        self.clip_count = 0

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.diameter)

    @property
    def radius(self) -> float:
        return self.diameter / 2.0

    def _project(self, w: DenseVector) -> DenseVector:
        if self.bounded:
            return project_ball(w, self.center, self.radius)
        return w

    def _support(self, g: Vector) -> SparseVector:
        if dimension_of(g) != self.dim:
            raise InvalidArgumentError(f"Gradient dimension {dimension_of(g)} != learner dimension {self.dim}")
        if isinstance(g, SparseVector):
            return g
        return SparseVector.from_dense(np.asarray(g, dtype=np.float64))

    @abstractmethod
    def current(self) -> DenseVector:
        """The point ``w_t`` the learner plays; a copy, never mutated by later steps."""

    @abstractmethod
    def step(self, g: Vector) -> None:
        """Consume the gradient observed at ``current()``."""


def learner_current(learner: OnlineLearner) -> DenseVector:
    return learner.current()
