"""Logistic loss oracle and problem constants.

All elementwise work goes through the vectorised helpers below, so the
single-example oracles and the batch engine compute bit-identical values for
the same margin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from svrgol.data.dataset import Dataset, Example
from svrgol.exceptions import InvalidArgumentError
from svrgol.linalg import DenseVector, SparseVector, dot


@dataclass(frozen=True)
class ProblemMeta:
    G: float
    L: float
    D: float
    dim: int

    def __post_init__(self) -> None:
        if self.G < 0 or self.L < 0:
            raise InvalidArgumentError(f"G and L must be non-negative, got G={self.G}, L={self.L}")
        if not self.D > 0:
            raise InvalidArgumentError(f"Domain diameter must be positive, got {self.D}")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.D)


def sigmoid(z: npt.ArrayLike) -> npt.NDArray[np.float64]:
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def logistic_losses(margins: npt.ArrayLike, labels: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """``log(1 + exp(-y*m))`` per example, stable for any margin."""
    z = np.asarray(labels, dtype=np.float64) * np.asarray(margins, dtype=np.float64)
    return np.maximum(-z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def logistic_coefficients(margins: npt.ArrayLike, labels: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Derivative of the loss in the margin: ``-y * sigmoid(-y*m)``."""
    y = np.asarray(labels, dtype=np.float64)
    z = y * np.asarray(margins, dtype=np.float64)
    e = np.exp(-np.abs(z))
    return -y * np.where(z >= 0, e / (1.0 + e), 1.0 / (1.0 + e))


def logistic_loss(w: DenseVector, e: Example) -> float:
    margin = dot(e.features, w)
    return float(logistic_losses([margin], [e.label])[0])


def logistic_grad(w: DenseVector, e: Example) -> SparseVector:
    margin = dot(e.features, w)
    coefficient = float(logistic_coefficients([margin], [e.label])[0])
    return e.features.scale(coefficient)


def estimate_constants(d: Dataset, diameter: float = math.inf) -> ProblemMeta:
    """Lipschitz and smoothness bounds of the logistic loss over ``d``.

    ``G = max ‖x‖`` and ``L = max ‖x‖² / 4``; ``diameter`` is passed through
    and defaults to an unbounded domain.
    """
    if len(d) == 0:
        raise InvalidArgumentError("Cannot estimate constants of an empty dataset")
    squared = d.row_norms() ** 2
    largest = float(np.max(squared))
    return ProblemMeta(G=math.sqrt(largest), L=largest / 4.0, D=diameter, dim=d.dim)


def full_gradient(w: DenseVector, d: Dataset) -> DenseVector:
    """Exact gradient of the average loss over a finite dataset."""
    from svrgol.vr.batch import batch_gradient

    gradient, _ = batch_gradient(w, d, workers=1)
    return gradient
