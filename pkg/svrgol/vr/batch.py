"""Parallel batch-gradient engine.

Samples are cut into fixed-size leaf blocks. Workers compute block partial
sums in any order; the partials are then folded in block order by a binary
tree whose shape depends only on the number of blocks. The result is
therefore bitwise identical for every worker count.
"""
from __future__ import annotations

import logging
from multiprocessing.pool import ThreadPool
from typing import Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from svrgol.data.dataset import Dataset, Example
from svrgol.data.sampler import StreamSampler
from svrgol.exceptions import InvalidArgumentError
from svrgol.linalg import DenseVector
from svrgol.losses import logistic_coefficients
from svrgol.vr.combine import FeatureStats

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 4096

Partial = Tuple[DenseVector, npt.NDArray[np.int64]]


def block_partial(v: DenseVector, block: Dataset) -> Partial:
    """Gradient sum and per-coordinate nonzero counts of one leaf block."""
    coefficients = logistic_coefficients(block.features @ v, block.labels)
    gradient_sum = np.asarray(block.features.T @ coefficients, dtype=np.float64)
    counts = np.bincount(block.features.indices, minlength=block.dim).astype(np.int64)
    return gradient_sum, counts


def _merge(left: Partial, right: Partial) -> Partial:
    return left[0] + right[0], left[1] + right[1]


def tree_reduce(partials: Iterable[Partial]) -> Partial:
    """Fold partials in arrival order with a shape fixed by their count.

    Equal-height subtrees are merged as soon as both exist (binary counter);
    the leftover spine is folded right to left at the end.
    """
    stack: List[Tuple[int, Partial]] = []
    for partial in partials:
        height = 0
        while stack and stack[-1][0] == height:
            _, left = stack.pop()
            partial = _merge(left, partial)
            height += 1
        stack.append((height, partial))
    if not stack:
        raise InvalidArgumentError("Cannot reduce an empty sequence of partial sums")
    _, result = stack.pop()
    while stack:
        _, left = stack.pop()
        result = _merge(left, result)
    return result


def tree_depth(blocks: int) -> int:
    return max(0, (blocks - 1).bit_length())


def _as_dataset(samples: Union[Dataset, Sequence[Example]], dim: int) -> Dataset:
    if isinstance(samples, Dataset):
        return samples
    return Dataset.from_examples(list(samples), dim)


def batch_gradient(
    v: DenseVector,
    samples: Union[Dataset, Sequence[Example]],
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> Tuple[DenseVector, FeatureStats]:
    """Mean logistic gradient at ``v`` over ``samples`` plus feature frequencies."""
    if workers < 1:
        raise InvalidArgumentError(f"workers must be >= 1, got {workers}")
    if block_size < 1:
        raise InvalidArgumentError(f"block_size must be >= 1, got {block_size}")
    v = np.asarray(v, dtype=np.float64)
    data = _as_dataset(samples, len(v))
    if len(data) == 0:
        raise InvalidArgumentError("Cannot compute a batch gradient over an empty sample set")
    if data.dim != len(v):
        raise InvalidArgumentError(f"Dimension mismatch: samples have {data.dim}, anchor has {len(v)}")

    n = len(data)
    bounds = [(start, min(start + block_size, n)) for start in range(0, n, block_size)]
    logger.debug(
        "Batch gradient over %s samples: %s blocks, tree depth %s, %s workers",
        n,
        len(bounds),
        tree_depth(len(bounds)),
        workers,
    )

    def leaf(bound: Tuple[int, int]) -> Partial:
        return block_partial(v, data.rows(*bound))

    if workers == 1 or len(bounds) == 1:
        gradient_sum, counts = tree_reduce(map(leaf, bounds))
    else:
        with ThreadPool(processes=min(workers, len(bounds))) as pool:
            gradient_sum, counts = tree_reduce(pool.imap(leaf, bounds))

    return gradient_sum / float(n), FeatureStats.from_counts(counts, n)


def _streamed_partials(
    v: DenseVector, sampler: StreamSampler, sizes: Sequence[int], workers: int
) -> Iterator[Partial]:
    def leaf(indices: npt.NDArray[np.int64]) -> Partial:
        return block_partial(v, sampler.dataset.take(indices))

    if workers == 1 or len(sizes) == 1:
        for size in sizes:
            yield leaf(sampler.draw_indices(size))
        return
    with ThreadPool(processes=min(workers, len(sizes))) as pool:
        for start in range(0, len(sizes), workers):
            window = [sampler.draw_indices(size) for size in sizes[start : start + workers]]
            yield from pool.map(leaf, window)


def stream_batch_gradient(
    v: DenseVector,
    sampler: StreamSampler,
    count: int,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> Tuple[DenseVector, FeatureStats]:
    """Mean gradient at ``v`` over ``count`` fresh draws from ``sampler``.

    Indices are drawn one leaf block at a time, in block order, and at most
    ``workers`` blocks are materialized at once. The result does not depend
    on the worker count.
    """
    if workers < 1:
        raise InvalidArgumentError(f"workers must be >= 1, got {workers}")
    if block_size < 1:
        raise InvalidArgumentError(f"block_size must be >= 1, got {block_size}")
    if count < 1:
        raise InvalidArgumentError(f"Cannot compute a batch gradient over {count} samples")
    v = np.asarray(v, dtype=np.float64)
    if sampler.dataset.dim != len(v):
        raise InvalidArgumentError(f"Dimension mismatch: samples have {sampler.dataset.dim}, anchor has {len(v)}")

    full, rest = divmod(count, block_size)
    sizes = [block_size] * full + ([rest] if rest else [])
    logger.debug(
        "Streamed batch gradient over %s samples: %s blocks, tree depth %s, %s workers",
        count,
        len(sizes),
        tree_depth(len(sizes)),
        workers,
    )
    gradient_sum, counts = tree_reduce(_streamed_partials(v, sampler, sizes, workers))
    return gradient_sum / float(count), FeatureStats.from_counts(counts, count)
