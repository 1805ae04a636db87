from __future__ import annotations

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field

CSV_COLUMNS = (
    "phase",
    "epoch",
    "rounds",
    "samples_seen",
    "train_loss",
    "test_loss",
    "auc",
    "subopt",
    "wall_ms",
)


class Phase(Enum):
    BATCH = "batch"
    SERIAL = "serial"
    STEP = "step"
    FINAL = "final"


class EpochRecord(BaseModel):
    """One report row, evaluated at the running average of the iterates."""

    phase: Phase
    epoch: int
    rounds: int
    samples_seen: int
    train_loss: float
    test_loss: Optional[float] = None
    auc: Optional[float] = None
    subopt: Optional[float] = None
    wall_ms: Optional[float] = None


class RunMetrics(BaseModel):
    rounds: int = Field(default=0, description="Communication rounds, one per parallel gradient aggregation")
    samples_seen: int = Field(default=0, description="Examples consumed by batch and serial phases together")
    batch_samples: int = 0
    serial_samples: int = 0
    clip_count: int = 0
    bias_bound: float = Field(
        default=0.0, description="Bias bound B the learner was built with; zero when compensation is off"
    )
    stopped_early: bool = Field(default=False, description="Set when the sample budget ended the schedule")
    diverged: bool = False
    records: List[EpochRecord] = Field(default_factory=list)

    def count_batch(self, size: int) -> None:
        self.rounds += 1
        self.batch_samples += size
        self.samples_seen += size

    def count_serial(self, steps: int = 1) -> None:
        self.serial_samples += steps
        self.samples_seen += steps

    @property
    def final(self) -> Optional[EpochRecord]:
        return self.records[-1] if self.records else None
