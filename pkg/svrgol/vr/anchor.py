from __future__ import annotations

from dataclasses import dataclass

from svrgol.exceptions import InvalidArgumentError
from svrgol.linalg import DenseVector
from svrgol.vr.combine import FeatureStats


@dataclass(frozen=True)
class AnchorState:
    """Anchor point of an epoch together with its batch gradient."""

    v: DenseVector
    batch_grad: DenseVector
    epoch: int
    batch_size_used: int
    stats: FeatureStats

    def __post_init__(self) -> None:
        if self.batch_grad.shape != self.v.shape:
            raise InvalidArgumentError(
                f"Batch gradient shape {self.batch_grad.shape} != anchor shape {self.v.shape}"
            )
        if self.batch_size_used < 1:
            raise InvalidArgumentError(f"batch_size_used must be >= 1, got {self.batch_size_used}")
