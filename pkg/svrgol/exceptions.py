from __future__ import annotations

from typing import TYPE_CHECKING, Any, Dict, Optional

if TYPE_CHECKING:  # pragma: no cover
    from svrgol.driver.metrics import RunMetrics


class SvrgOlError(Exception):
    """Base class for every failure raised by the toolkit."""


class InvalidArgumentError(SvrgOlError, ValueError):
    """Raised when an operation receives arguments outside its contract."""


class InvalidStateError(SvrgOlError, RuntimeError):
    """Raised when an operation is called before its prerequisites ran."""


class ParseError(InvalidArgumentError):
    def __init__(self, message: str, line: str = "", line_number: Optional[int] = None) -> None:
        self.message = message
        self.line = line
        self.line_number = line_number
        location = f"line {line_number}" if line_number is not None else "line"
        super().__init__(f"{message} ({location}: {line.strip()!r})")


class UndefinedMetricError(SvrgOlError, ValueError):
    """Raised when a metric has no value for the given input (e.g. single-class AUC)."""


class ScheduleExhaustedError(SvrgOlError):
    def __init__(self, epoch: int, k_max: int) -> None:
        super().__init__(f"Epoch {epoch} requested but the schedule ends at K_max={k_max}")
        self.epoch = epoch
        self.k_max = k_max


class DivergenceError(SvrgOlError):
    def __init__(
        self,
        reason: str,
        epoch: int,
        metrics: Optional["RunMetrics"] = None,
        loss: Optional[float] = None,
        step: Optional[int] = None,
    ) -> None:
        super().__init__(f"Run diverged in epoch {epoch}: {reason}")
        self.reason = reason
        self.epoch = epoch
        self.step = step
        self.metrics = metrics
        self.loss = loss

    def as_payload(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"error": "diverged", "reason": self.reason, "epoch": self.epoch}
        if self.step is not None:
            payload["step"] = self.step
        if self.loss is not None:
            payload["train_loss"] = self.loss
        if self.metrics is not None:
            payload["rounds"] = self.metrics.rounds
            payload["samples_seen"] = self.metrics.samples_seen
        return payload


class ConfigError(SvrgOlError):
    """Raised when the run configuration cannot be parsed or validated."""


class DataIOError(SvrgOlError):
    def __init__(self, message: str, path: str) -> None:
        super().__init__(f"{message}: {path}")
        self.path = path
