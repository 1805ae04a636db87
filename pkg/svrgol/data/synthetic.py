from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from svrgol.data.dataset import Dataset
from svrgol.data.sampler import Seed
from svrgol.exceptions import InvalidArgumentError
from svrgol.linalg import DenseVector
from svrgol.losses import sigmoid

logger = logging.getLogger(__name__)


def make_w_true(dim: int, norm: float, seed: Seed = None) -> DenseVector:
    if dim < 1:
        raise InvalidArgumentError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(dim)
    return norm * direction / np.linalg.norm(direction)


def gen_synthetic(
    dim: int,
    n: int,
    sparsity: int,
    w_true: DenseVector,
    seed: Seed = None,
) -> Dataset:
    """Logistic-model data with a known generating vector.

    Each example has ``sparsity`` distinct coordinates drawn uniformly, standard
    normal values, and label +1 with probability ``sigmoid(w_true·x)``.
    """
    if dim < 1 or n < 1:
        raise InvalidArgumentError(f"dim and n must be >= 1, got dim={dim}, n={n}")
    if not 0 <= sparsity <= dim:
        raise InvalidArgumentError(f"sparsity must be in [0, {dim}], got {sparsity}")
    w_true = np.asarray(w_true, dtype=np.float64)
    if w_true.shape != (dim,):
        raise InvalidArgumentError(f"w_true must have shape ({dim},), got {w_true.shape}")

    rng = np.random.default_rng(seed)
    indices = np.empty(n * sparsity, dtype=np.int64)
    for row in range(n):
        chosen = rng.choice(dim, size=sparsity, replace=False)
        indices[row * sparsity : (row + 1) * sparsity] = np.sort(chosen)
    values = rng.standard_normal(n * sparsity)
    indptr = np.arange(0, n * sparsity + 1, sparsity, dtype=np.int64) if sparsity else np.zeros(n + 1, dtype=np.int64)
    features = sp.csr_matrix((values, indices, indptr), shape=(n, dim))

    probabilities = sigmoid(features @ w_true)
    labels = np.where(rng.random(n) < probabilities, 1.0, -1.0)
    logger.debug("Generated %s synthetic examples (dim=%s, sparsity=%s)", n, dim, sparsity)
    return Dataset(features, labels)


def gen_problem(
    dim: int,
    n: int,
    sparsity: int,
    norm: float,
    seed: Optional[int] = None,
    n_test: int = 0,
) -> Tuple[Dataset, Optional[Dataset], DenseVector]:
    """Training set, optional held-out set and the generating vector from one seed."""
    w_seed, train_seed, test_seed = np.random.SeedSequence(seed).spawn(3)
    w_true = make_w_true(dim, norm, w_seed)
    train = gen_synthetic(dim, n, sparsity, w_true, train_seed)
    test = gen_synthetic(dim, n_test, sparsity, w_true, test_seed) if n_test else None
    return train, test, w_true
