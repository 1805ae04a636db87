from __future__ import annotations

import csv
import logging
import sys
from pathlib import Path
from typing import IO, Any, Dict, List, Optional

import numpy as np
import yaml

from svrgol.cli.config import RunConfig
from svrgol.driver.metrics import CSV_COLUMNS, EpochRecord, RunMetrics
from svrgol.exceptions import DataIOError
from svrgol.linalg import DenseVector

logger = logging.getLogger(__name__)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_row(record: EpochRecord) -> List[str]:
    return [
        record.phase.value,
        _cell(record.epoch),
        _cell(record.rounds),
        _cell(record.samples_seen),
        _cell(record.train_loss),
        _cell(record.test_loss),
        _cell(record.auc),
        _cell(record.subopt),
        _cell(record.wall_ms),
    ]


class CsvReport:
    """Streams report rows to a file (or stdout), flushing after every row."""

    def __init__(self, path: Optional[Path] = None) -> None:
        self.path = path
        self._owned = path is not None
        try:
            self._stream: IO[str] = open(path, "w", encoding="utf-8", newline="") if path is not None else sys.stdout
        except OSError as exc:
            raise DataIOError(f"Cannot open CSV output ({exc.strerror})", str(path)) from exc
        self._writer = csv.writer(self._stream, lineterminator="\n")
        self._writer.writerow(CSV_COLUMNS)
        self.rows = 0

    def write(self, record: EpochRecord) -> None:
        self._writer.writerow(format_row(record))
        self._stream.flush()
        self.rows += 1

    def close(self) -> None:
        if self._owned:
            self._stream.close()

    def __enter__(self) -> "CsvReport":
        return self

    def __exit__(self, *exc_info: Any) -> None:
        self.close()


def write_weights(path: Path, w: DenseVector) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for value in np.asarray(w, dtype=np.float64).tolist():
                handle.write(f"{value!r}\n")
    except OSError as exc:
        raise DataIOError(f"Cannot write weights ({exc.strerror})", str(path)) from exc
    logger.info("Wrote %s weights to %s", len(w), path)


def read_weights(path: Path, dim: Optional[int] = None) -> DenseVector:
    try:
        with open(path, encoding="utf-8") as handle:
            values = [float(line) for line in handle if line.strip()]
    except OSError as exc:
        raise DataIOError(f"Cannot read weights ({exc.strerror})", str(path)) from exc
    except ValueError as exc:
        raise DataIOError(f"Malformed weight file ({exc})", str(path)) from exc
    if dim is not None and len(values) != dim:
        raise DataIOError(f"Expected {dim} weights, found {len(values)}", str(path))
    return np.asarray(values, dtype=np.float64)


def run_summary(cfg: RunConfig, metrics: RunMetrics) -> Dict[str, Any]:
    final = metrics.final
    return {
        "config": cfg.model_dump(mode="json"),
        "rounds": metrics.rounds,
        "samples_seen": metrics.samples_seen,
        "batch_samples": metrics.batch_samples,
        "serial_samples": metrics.serial_samples,
        "clip_count": metrics.clip_count,
        "bias_bound": metrics.bias_bound,
        "stopped_early": metrics.stopped_early,
        "diverged": metrics.diverged,
        "final": final.model_dump(mode="json") if final is not None else None,
    }


def write_summary(path: Path, cfg: RunConfig, metrics: RunMetrics) -> None:
    try:
        with open(path, "w", encoding="utf-8") as handle:
            yaml.safe_dump(run_summary(cfg, metrics), handle, sort_keys=False)
    except OSError as exc:
        raise DataIOError(f"Cannot write run summary ({exc.strerror})", str(path)) from exc
