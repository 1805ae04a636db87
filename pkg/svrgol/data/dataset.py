from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from svrgol.exceptions import InvalidArgumentError
from svrgol.linalg import DenseVector, SparseVector


@dataclass(frozen=True)
class Example:
    features: SparseVector
    label: int

    def __post_init__(self) -> None:
        if self.label not in (-1, 1):
            raise InvalidArgumentError(f"Label must be -1 or +1, got {self.label}")


class Dataset:
    """Immutable collection of examples backed by a CSR feature matrix.

    Rows keep sorted, duplicate-free column indices without explicit zeros,
    so every row is a canonical ``SparseVector``. Instances are shared
    read-only between worker threads.
    """

    features: sp.csr_matrix
    labels: npt.NDArray[np.float64]

    def __init__(self, features: sp.csr_matrix, labels: npt.ArrayLike) -> None:
        features = sp.csr_matrix(features, dtype=np.float64, copy=True)
        features.sum_duplicates()
        features.eliminate_zeros()
        features.sort_indices()
        labels = np.asarray(labels, dtype=np.float64)
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise InvalidArgumentError(
                f"Expected {features.shape[0]} labels, got shape {labels.shape}"
            )
        if labels.size and not np.all(np.abs(labels) == 1.0):
            raise InvalidArgumentError("Labels must be -1 or +1")
        self.features = features
        self.labels = labels

    @classmethod
    def _wrap(cls, features: sp.csr_matrix, labels: npt.NDArray[np.float64]) -> "Dataset":
        # rows of an already canonical matrix, normalisation skipped
        dataset = cls.__new__(cls)
        dataset.features = features
        dataset.labels = labels
        return dataset

    @staticmethod
    def from_examples(examples: Sequence[Example], dim: int) -> "Dataset":
        indptr = np.zeros(len(examples) + 1, dtype=np.int64)
        for row, example in enumerate(examples):
            if example.features.dim != dim:
                raise InvalidArgumentError(
                    f"Example {row} has dimension {example.features.dim}, expected {dim}"
                )
            indptr[row + 1] = indptr[row] + example.features.nnz
        if examples:
            indices = np.concatenate([e.features.indices for e in examples])
            values = np.concatenate([e.features.values for e in examples])
        else:
            indices = np.zeros(0, dtype=np.int64)
            values = np.zeros(0, dtype=np.float64)
        features = sp.csr_matrix((values, indices, indptr), shape=(len(examples), dim))
        return Dataset(features, [e.label for e in examples])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def nnz(self) -> int:
        return int(self.features.nnz)

    def __len__(self) -> int:
        return int(self.features.shape[0])

    def __getitem__(self, row: int) -> Example:
        if row < 0:
            row += len(self)
        if not 0 <= row < len(self):
            raise IndexError(row)
        start, stop = self.features.indptr[row], self.features.indptr[row + 1]
        vector = SparseVector(
            self.features.indices[start:stop].astype(np.int64),
            self.features.data[start:stop].copy(),
            self.dim,
        )
        return Example(vector, int(self.labels[row]))

    def __iter__(self) -> Iterator[Example]:
        for row in range(len(self)):
            yield self[row]

    def take(self, rows: Union[Sequence[int], npt.NDArray[np.int64]]) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.features[rows], self.labels[rows])

    def rows(self, start: int, stop: int) -> "Dataset":
        """Contiguous row range ``[start, stop)`` sharing this dataset's buffers."""
        indptr = self.features.indptr
        lo, hi = indptr[start], indptr[stop]
        block = sp.csr_matrix(
            (self.features.data[lo:hi], self.features.indices[lo:hi], indptr[start : stop + 1] - lo),
            shape=(stop - start, self.dim),
        )
        return Dataset._wrap(block, self.labels[start:stop])

    def scaled(self, factor: float) -> "Dataset":
        return Dataset(self.features * factor, self.labels)

    def concat(self, other: "Dataset") -> "Dataset":
        if other.dim != self.dim:
            raise InvalidArgumentError(f"Dimension mismatch: {self.dim} != {other.dim}")
        return Dataset(sp.vstack([self.features, other.features]), np.concatenate([self.labels, other.labels]))

    def margins(self, w: DenseVector) -> npt.NDArray[np.float64]:
        if len(w) != self.dim:
            raise InvalidArgumentError(f"Dimension mismatch: {len(w)} != {self.dim}")
        return np.asarray(self.features @ w, dtype=np.float64)

    def row_norms(self) -> npt.NDArray[np.float64]:
        squared = self.features.multiply(self.features).sum(axis=1)
        return np.sqrt(np.asarray(squared, dtype=np.float64).ravel())
