from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt

from svrgol.exceptions import InvalidArgumentError, InvalidStateError
from svrgol.linalg import DenseVector, SparseVector, Vector, check_dims, to_dense


@dataclass(frozen=True)
class FeatureStats:
    """Per-coordinate nonzero counts observed in a batch phase.

    ``probability`` turns them into importance weights ``max(count/total, p_floor)``.
    """

    nonzero_counts: npt.NDArray[np.int64]
    total: int
    p_floor: float

    def __post_init__(self) -> None:
        if self.total < 0:
            raise InvalidArgumentError(f"total must be non-negative, got {self.total}")
        if not 0 < self.p_floor <= 1:
            raise InvalidArgumentError(f"p_floor must be in (0, 1], got {self.p_floor}")
        if np.any(self.nonzero_counts < 0) or np.any(self.nonzero_counts > self.total):
            raise InvalidArgumentError("Nonzero counts must lie in [0, total]")

    @staticmethod
    def from_counts(counts: npt.ArrayLike, total: int, p_floor: Optional[float] = None) -> "FeatureStats":
        if p_floor is None:
            p_floor = 1.0 / total if total > 0 else 1.0
        return FeatureStats(np.asarray(counts, dtype=np.int64), int(total), float(p_floor))

    @property
    def dim(self) -> int:
        return len(self.nonzero_counts)

    def probability(self, indices: npt.NDArray[np.int64]) -> DenseVector:
        if self.total == 0:
            raise InvalidStateError("Feature statistics are empty; run a batch phase first")
        frequency = self.nonzero_counts[indices] / float(self.total)
        return np.minimum(np.maximum(frequency, self.p_floor), 1.0)

    def floor_hits(self) -> int:
        """Coordinates whose empirical frequency falls under the floor."""
        if self.total == 0:
            return 0
        return int(np.count_nonzero(self.nonzero_counts / float(self.total) < self.p_floor))


def combine_dense(grad_w: Vector, grad_anchor: Vector, batch_grad: DenseVector) -> DenseVector:
    check_dims(grad_w, grad_anchor)
    check_dims(grad_w, batch_grad)
    return (to_dense(grad_w) - to_dense(grad_anchor)) + batch_grad


def combine_sparse(
    grad_w: SparseVector,
    grad_anchor: SparseVector,
    batch_grad: DenseVector,
    stats: FeatureStats,
) -> SparseVector:
    """Variance-reduced gradient restricted to the support of ``grad_w``.

    The anchor gradient is reweighted by ``1 / p̂_i`` so the estimate stays
    unbiased while touching only the sample's features.
    """
    check_dims(grad_w, grad_anchor)
    check_dims(grad_w, batch_grad)
    if stats.dim != grad_w.dim:
        raise InvalidArgumentError(f"Feature statistics dimension {stats.dim} != {grad_w.dim}")
    if stats.total == 0:
        raise InvalidStateError("Feature statistics are empty; run a batch phase first")
    if grad_w.nnz == 0:
        return SparseVector.empty(grad_w.dim)

    support = grad_w.indices
    values = (grad_w.values - grad_anchor.restrict(support)) + batch_grad[support] / stats.probability(support)
    keep = values != 0.0
    return SparseVector(support[keep], values[keep], grad_w.dim)
