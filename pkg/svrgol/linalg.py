"""Sparse/dense vector arithmetic shared by the loss, learner and variance-reduction code.

Dense vectors are plain ``float64`` numpy arrays. Sparse vectors keep their
support as strictly increasing indices with no stored zeros; every reduction
runs in ascending index order so repeated runs produce identical bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np
import numpy.typing as npt

from svrgol.exceptions import InvalidArgumentError

DenseVector = npt.NDArray[np.float64]

_EMPTY_INDICES = np.zeros(0, dtype=np.int64)
_EMPTY_VALUES = np.zeros(0, dtype=np.float64)


@dataclass(frozen=True)
class SparseVector:
    indices: npt.NDArray[np.int64]
    values: npt.NDArray[np.float64]
    dim: int

    @staticmethod
    def empty(dim: int) -> "SparseVector":
        return SparseVector(_EMPTY_INDICES, _EMPTY_VALUES, dim)

    @staticmethod
    def from_pairs(pairs: Iterable[Tuple[int, float]], dim: int) -> "SparseVector":
        """Build a vector from arbitrary (index, value) pairs.

        Pairs are sorted by index, duplicate indices are summed and exact zeros
        are dropped, so the result always satisfies the class invariants.
        """
        merged: dict = {}
        for index, value in pairs:
            index = int(index)
            if index < 0 or index >= dim:
                raise InvalidArgumentError(f"Index {index} outside dimension {dim}")
            merged[index] = merged.get(index, 0.0) + float(value)
        support = sorted(i for i, v in merged.items() if v != 0.0)
        if not support:
            return SparseVector.empty(dim)
        return SparseVector(
            np.asarray(support, dtype=np.int64),
            np.asarray([merged[i] for i in support], dtype=np.float64),
            dim,
        )

    @staticmethod
    def from_dense(values: DenseVector) -> "SparseVector":
        support = np.flatnonzero(values)
        return SparseVector(support.astype(np.int64), values[support].astype(np.float64), len(values))

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def to_dense(self) -> DenseVector:
        out = np.zeros(self.dim, dtype=np.float64)
        out[self.indices] = self.values
        return out

    def scale(self, alpha: float) -> "SparseVector":
        if alpha == 0.0:
            return SparseVector.empty(self.dim)
        values = alpha * self.values
        keep = values != 0.0
        return SparseVector(self.indices[keep], values[keep], self.dim)

    def restrict(self, support: npt.NDArray[np.int64]) -> DenseVector:
        """Values of this vector on ``support`` (zeros where absent)."""
        out = np.zeros(len(support), dtype=np.float64)
        if self.nnz == 0 or len(support) == 0:
            return out
        pos = np.searchsorted(self.indices, support)
        pos = np.minimum(pos, self.nnz - 1)
        hit = self.indices[pos] == support
        out[hit] = self.values[pos[hit]]
        return out

    def is_canonical(self) -> bool:
        if len(self.indices) != len(self.values):
            return False
        if self.nnz == 0:
            return True
        return bool(
            np.all(np.diff(self.indices) > 0)
            and self.indices[0] >= 0
            and self.indices[-1] < self.dim
            and np.all(self.values != 0.0)
        )


Vector = Union[SparseVector, DenseVector]


def dimension_of(v: Vector) -> int:
    if isinstance(v, SparseVector):
        return v.dim
    return len(v)


def check_dims(a: Vector, b: Vector) -> None:
    if dimension_of(a) != dimension_of(b):
        raise InvalidArgumentError(
            f"Dimension mismatch: {dimension_of(a)} != {dimension_of(b)}"
        )


def dot(a: SparseVector, b: DenseVector) -> float:
    check_dims(a, b)
    total = 0.0
    for value, other in zip(a.values.tolist(), b[a.indices].tolist()):
        total += value * other
    return total


def axpy_sparse(alpha: float, x: SparseVector, y: DenseVector) -> DenseVector:
    """In-place ``y += alpha * x`` touching only the support of ``x``; returns ``y``."""
    check_dims(x, y)
    if x.nnz:
        y[x.indices] += alpha * x.values
    return y


def l2_norm(v: Vector) -> float:
    values = v.values if isinstance(v, SparseVector) else v
    return float(np.sqrt(np.dot(values, values)))


def to_dense(v: Vector) -> DenseVector:
    if isinstance(v, SparseVector):
        return v.to_dense()
    return np.asarray(v, dtype=np.float64)
