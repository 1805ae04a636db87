from __future__ import annotations

import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from svrgol.data.libsvm import MAX_HASH_BITS, MIN_HASH_BITS
from svrgol.driver.schedule import ScheduleMode
from svrgol.exceptions import ConfigError
from svrgol.learners.adagrad import DEFAULT_EPSILON
from svrgol.learners.factory import LearnerKind
from svrgol.vr.batch import DEFAULT_BLOCK_SIZE

logger = logging.getLogger(__name__)

ENV_PREFIX = "SVRGOL_"
LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


class Algorithm(Enum):
    SVRG_OL = "svrg-ol"
    SGD = "sgd"
    MINIBATCH = "minibatch"
    SVRG_CONST = "svrg-const"


class SyntheticSpec(BaseModel):
    """Synthetic logistic problem, written ``dim=20,n=16384,sparsity=5,norm=3,test=4096``."""

    dim: int = Field(ge=1)
    n: int = Field(ge=1)
    sparsity: Optional[int] = Field(None, ge=0)
    norm: float = Field(3.0, ge=0.0)
    test: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _default_sparsity(self) -> "SyntheticSpec":
        if self.sparsity is None:
            self.sparsity = min(5, self.dim)
        if self.sparsity > self.dim:
            raise ValueError(f"sparsity {self.sparsity} exceeds dim {self.dim}")
        return self

    @staticmethod
    def parse(text: str) -> "SyntheticSpec":
        values: Dict[str, str] = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            key, sep, value = item.partition("=")
            if not sep or not key.strip():
                raise ValueError(f"Malformed synthetic spec entry {item!r}, expected key=value")
            values[key.strip()] = value.strip()
        return SyntheticSpec(**values)


class RunConfig(BaseSettings):
    """Flat experiment configuration; every key can also come from ``SVRGOL_<KEY>``."""

    algo: Algorithm = Field(Algorithm.SVRG_OL, description="Optimizer to run")
    learner: LearnerKind = Field(LearnerKind.ADAGRAD, description="Online learner fed with the gradients")
    schedule: ScheduleMode = Field(ScheduleMode.PRACTICAL, description="Epoch schedule of svrg-ol and svrg-const")
    t1: int = Field(64, ge=0, description="Serial steps of the first epoch")
    c: int = Field(100, ge=1, description="Batch growth constant of the practical schedule (N̂_k = k·C)")
    kmax: int = Field(20, ge=1, description="Maximum number of epochs of the practical schedule")
    nhat: Optional[int] = Field(None, ge=1, description="Fixed batch size overriding the theory schedule's choice")
    budget: Optional[int] = Field(None, ge=1, description="Total sample budget N (batch and serial samples)")
    serial_budget: Optional[int] = Field(None, ge=1, description="Planned serial steps T of the theory schedules")
    batch: Optional[int] = Field(None, ge=1, description="Minibatch size b; defaults to ceil(sqrt(N))")
    rho: float = Field(2.0, ge=1.0, description="Growth ratio of the serial phase in the theory schedules")
    eta: Optional[float] = Field(None, ge=0.0, description="Step size; learner default when omitted")
    diameter: float = Field(math.inf, gt=0.0, description="Diameter D of the feasible ball, inf for unconstrained")
    epsilon: float = Field(DEFAULT_EPSILON, ge=0.0, description="AdaGrad denominator offset")
    workers: int = Field(1, ge=1, description="Worker threads of the batch phase")
    block_size: int = Field(DEFAULT_BLOCK_SIZE, ge=1, description="Leaf block size of the gradient tree")
    hash_bits: int = Field(23, ge=MIN_HASH_BITS, le=MAX_HASH_BITS, description="Feature hashing width")
    seed: int = Field(0, ge=0, description="Seed of data generation and sampling")
    compensate: bool = Field(
        False, description="Add the batch-error compensation term to every gradient when D is unbounded"
    )
    sparse_combine: bool = Field(True, description="Importance-sampled sparse variance reduction")
    data: Optional[Path] = Field(None, description="Training data in LibSVM format")
    test: Optional[Path] = Field(None, description="Held-out data in LibSVM format")
    synthetic: Optional[str] = Field(None, description="Synthetic problem spec instead of --data")
    out: Optional[Path] = Field(None, description="CSV output path, stdout when omitted")
    eval_every: Optional[int] = Field(None, ge=1, description="Serial steps between report rows of the baselines")
    w_star: Optional[Path] = Field(None, description="Weight dump of the optimum, enables the subopt column")
    weights_out: Optional[Path] = Field(None, description="Where to dump the final weights")
    summary_out: Optional[Path] = Field(None, description="Where to write the YAML run summary")
    timing: bool = Field(False, description="Record wall-clock milliseconds in the CSV")
    log_level: str = Field("INFO", description="Root log level")

    model_config = SettingsConfigDict(env_prefix=ENV_PREFIX, case_sensitive=False, extra="forbid")

    @field_validator("synthetic")
    @classmethod
    def _check_synthetic(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            try:
                SyntheticSpec.parse(value)
            except ValueError as exc:
                raise ValueError(f"Invalid synthetic spec {value!r}: {exc}") from None
        return value

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"Unknown log level {value!r}")
        return level

    @model_validator(mode="after")
    def _check_run(self) -> "RunConfig":
        if (self.data is None) == (self.synthetic is None):
            raise ValueError("Exactly one data source is required: --data or --synthetic")
        if self.test is not None and self.data is None:
            raise ValueError("--test goes with --data; synthetic problems set their own test size")
        uses_const = self.algo == Algorithm.SVRG_CONST or self.learner == LearnerKind.CONST
        if uses_const and self.eta is None:
            raise ValueError("The constant-step learner requires --eta")
        if self.eta is not None and self.eta <= 0 and not uses_const:
            raise ValueError(f"--eta must be positive for the {self.learner.value} learner, got {self.eta}")
        if self.schedule.geometric and self.algo in (Algorithm.SVRG_OL, Algorithm.SVRG_CONST):
            if self.t1 < 1:
                raise ValueError(f"The {self.schedule.value} schedule needs --t1 >= 1")
            if self.serial_budget is None and self.budget is None and self.nhat is None:
                raise ValueError(f"The {self.schedule.value} schedule needs --serial-budget or --budget")
        if self.algo in (Algorithm.SGD, Algorithm.MINIBATCH) and self.budget is None and self.schedule.geometric:
            if self.serial_budget is None:
                raise ValueError("Baselines need --budget or a schedule whose sample total is known")
        return self

    @property
    def synthetic_spec(self) -> Optional[SyntheticSpec]:
        return SyntheticSpec.parse(self.synthetic) if self.synthetic is not None else None

    @property
    def learner_kind(self) -> LearnerKind:
        return LearnerKind.CONST if self.algo == Algorithm.SVRG_CONST else self.learner


def _normalize_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_").lower()


def load_config_file(path: Path) -> Dict[str, str]:
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc
    values: Dict[str, str] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{line_number}: expected key = value, got {raw!r}")
        values[_normalize_key(key)] = value.strip()
    logger.debug("Loaded %s keys from %s", len(values), path)
    return values


def build_config(overrides: Mapping[str, Any], config_path: Optional[Path] = None) -> RunConfig:
    """Merge sources, highest precedence first: ``overrides``, ``config_path``, environment, defaults."""
    values: Dict[str, Any] = {}
    if config_path is not None:
        values.update(load_config_file(config_path))
    values.update({_normalize_key(k): v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise ConfigError(f"Invalid configuration: {exc}") from exc
