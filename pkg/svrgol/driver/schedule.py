"""Epoch schedules: serial-phase lengths and batch sizes per epoch.

``theory`` grows the serial phase geometrically with a fixed batch size tied
to the planned serial budget; ``practical`` keeps the serial phase constant and
grows the batch linearly with the epoch index.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Tuple

from svrgol.exceptions import InvalidArgumentError, ScheduleExhaustedError
from svrgol.vr.sizing import tolerant_ceil

logger = logging.getLogger(__name__)


class ScheduleMode(Enum):
    THEORY = "theory"
    PRACTICAL = "practical"
    THEORY_FIRSTORDER = "theory-firstorder"

    @property
    def geometric(self) -> bool:
        return self != ScheduleMode.PRACTICAL


def nominal_length(T1: int, rho: float, k: int) -> int:
    return tolerant_ceil(T1 * rho ** (k - 1))


def epoch_count(serial_budget: int, T1: int, rho: float) -> int:
    """Epochs that fit ``serial_budget``: each one's nominal length fits and its predecessors leave room."""
    if T1 < 1:
        raise InvalidArgumentError(f"Geometric schedules need T1 >= 1, got {T1}")
    k = 1
    used = min(T1, serial_budget)
    while used < serial_budget and nominal_length(T1, rho, k + 1) <= serial_budget:
        k += 1
        used += nominal_length(T1, rho, k)
    return k


def first_order_batch_size(serial_budget: int) -> int:
    """Smallest ``n`` with ``n³ >= T⁴``."""
    target = serial_budget ** 4
    n = max(1, tolerant_ceil(serial_budget ** (4.0 / 3.0)))
    while n ** 3 < target:
        n += 1
    while n > 1 and (n - 1) ** 3 >= target:
        n -= 1
    return n


def theory_batch_size(mode: ScheduleMode, serial_budget: int) -> int:
    if mode == ScheduleMode.THEORY_FIRSTORDER:
        return first_order_batch_size(serial_budget)
    return max(1, serial_budget * serial_budget)


@dataclass(frozen=True)
class EpochSchedule:
    mode: ScheduleMode
    T1: int
    K_max: int
    C: int = 1
    rho: float = 2.0
    nhat: Optional[int] = None
    serial_budget: Optional[int] = None

    def __post_init__(self) -> None:
        if self.T1 < 0:
            raise InvalidArgumentError(f"T1 must be >= 0, got {self.T1}")
        if self.K_max < 1:
            raise InvalidArgumentError(f"K_max must be >= 1, got {self.K_max}")
        if self.C < 1:
            raise InvalidArgumentError(f"C must be >= 1, got {self.C}")
        if self.rho < 1:
            raise InvalidArgumentError(f"rho must be >= 1, got {self.rho}")
        if self.nhat is not None and self.nhat < 1:
            raise InvalidArgumentError(f"nhat must be >= 1, got {self.nhat}")
        if self.mode.geometric and self.nhat is None and self.serial_budget is None:
            raise InvalidArgumentError(f"The {self.mode.value} schedule needs a batch size or a serial budget")

    @staticmethod
    def geometric(
        mode: ScheduleMode,
        T1: int,
        serial_budget: int,
        rho: float = 2.0,
        nhat: Optional[int] = None,
    ) -> "EpochSchedule":
        """Geometric schedule spending exactly ``serial_budget`` serial steps."""
        if serial_budget < 1:
            raise InvalidArgumentError(f"serial_budget must be >= 1, got {serial_budget}")
        K = epoch_count(serial_budget, T1, rho)
        return EpochSchedule(mode, T1, K, rho=rho, nhat=nhat, serial_budget=serial_budget)

    @staticmethod
    def plan_from_budget(
        mode: ScheduleMode,
        T1: int,
        budget: int,
        rho: float = 2.0,
        nhat: Optional[int] = None,
    ) -> "EpochSchedule":
        """Largest serial budget ``T`` whose schedule, batches included, fits ``budget`` samples."""
        schedule = EpochSchedule.geometric(mode, T1, 1, rho, nhat)
        if schedule.total_samples() > budget:
            raise InvalidArgumentError(f"Sample budget {budget} cannot fit a single {mode.value} epoch")
        lo, hi = 1, budget
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if EpochSchedule.geometric(mode, T1, mid, rho, nhat).total_samples() <= budget:
                lo = mid
            else:
                hi = mid - 1
        planned = EpochSchedule.geometric(mode, T1, lo, rho, nhat)
        logger.info(
            "Planned %s schedule for budget %s: T=%s, K=%s, nhat=%s",
            mode.value,
            budget,
            lo,
            planned.K_max,
            planned.batch_size(1),
        )
        return planned

    def batch_size(self, k: int) -> int:
        if not self.mode.geometric:
            return k * self.C
        if self.nhat is not None:
            return self.nhat
        assert self.serial_budget is not None
        return theory_batch_size(self.mode, self.serial_budget)

    def serial_length(self, k: int) -> int:
        if not self.mode.geometric:
            return self.T1
        nominal = nominal_length(self.T1, self.rho, k)
        if self.serial_budget is None:
            return nominal
        spent = sum(nominal_length(self.T1, self.rho, j) for j in range(1, k))
        if k == self.K_max:
            return max(0, self.serial_budget - spent)
        return nominal

    def total_samples(self) -> int:
        return sum(t + n for t, n in self.epochs())

    def epochs(self) -> Iterator[Tuple[int, int]]:
        for k in range(1, self.K_max + 1):
            yield next_epoch(self, k)


def next_epoch(sched: EpochSchedule, k: int) -> Tuple[int, int]:
    """``(T_k, N̂_k)`` for epoch ``k`` (1-based)."""
    if k < 1:
        raise InvalidArgumentError(f"Epochs are numbered from 1, got {k}")
    if k > sched.K_max:
        raise ScheduleExhaustedError(k, sched.K_max)
    return sched.serial_length(k), sched.batch_size(k)
