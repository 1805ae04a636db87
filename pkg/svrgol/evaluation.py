"""Report metrics: average loss, AUC, suboptimality and loss-vs-time comparisons."""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt
from scipy.stats import rankdata

from svrgol.data.dataset import Dataset
from svrgol.driver.metrics import EpochRecord
from svrgol.exceptions import InvalidArgumentError, UndefinedMetricError
from svrgol.linalg import DenseVector
from svrgol.losses import logistic_losses


def average_loss(w: DenseVector, d: Dataset) -> float:
    if len(d) == 0:
        raise InvalidArgumentError("Cannot average the loss over an empty dataset")
    losses = logistic_losses(d.margins(w), d.labels)
    return math.fsum(losses.tolist()) / len(d)


def auc(scores: npt.ArrayLike, labels: npt.ArrayLike) -> float:
    """Probability that a random positive outscores a random negative, ties counting half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if scores.shape != labels.shape:
        raise InvalidArgumentError(f"Got {scores.shape} scores for {labels.shape} labels")
    positive = labels > 0
    n_pos = int(np.count_nonzero(positive))
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs at least one positive and one negative example")
    ranks = rankdata(scores, method="average")
    concordant = float(np.sum(ranks[positive])) - n_pos * (n_pos + 1) / 2.0
    return concordant / (n_pos * n_neg)


def dataset_auc(w: DenseVector, d: Dataset) -> Optional[float]:
    try:
        return auc(d.margins(w), d.labels)
    except UndefinedMetricError:
        return None


def suboptimality(w: DenseVector, d: Dataset, w_star: DenseVector) -> float:
    return average_loss(w, d) - average_loss(w_star, d)


def time_to_loss(records: Sequence[EpochRecord], target: float, by: str = "wall_ms") -> Optional[float]:
    """First ``by`` value (``wall_ms`` or ``samples_seen``) at which train loss reaches ``target``."""
    if by not in ("wall_ms", "samples_seen"):
        raise InvalidArgumentError(f"Cannot measure time by {by!r}")
    for record in records:
        if record.train_loss <= target:
            value = getattr(record, by)
            if value is None:
                raise UndefinedMetricError(f"Records carry no {by}; rerun with timing enabled")
            return float(value)
    return None


def speedup_ratio(
    parallel: Sequence[EpochRecord],
    serial: Sequence[EpochRecord],
    target: float,
    by: str = "wall_ms",
) -> float:
    """Fraction of the serial run's time the parallel run needs to reach ``target``."""
    parallel_time = time_to_loss(parallel, target, by)
    serial_time = time_to_loss(serial, target, by)
    if parallel_time is None or serial_time is None:
        raise UndefinedMetricError(f"Target loss {target} not reached by both runs")
    if serial_time == 0:
        raise UndefinedMetricError("Serial run reached the target at time zero")
    return parallel_time / serial_time
