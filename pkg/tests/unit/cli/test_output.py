import numpy as np
import pytest
import yaml

from svrgol.cli.output import CsvReport, format_row, read_weights, run_summary, write_summary, write_weights
from svrgol.driver.metrics import EpochRecord, Phase, RunMetrics
from svrgol.exceptions import DataIOError


def _record(**overrides) -> EpochRecord:
    values = dict(phase=Phase.BATCH, epoch=1, rounds=1, samples_seen=5, train_loss=0.5)
    values.update(overrides)
    return EpochRecord(**values)


class TestFormatRow:
    def test_missing_values_are_empty(self):
        assert format_row(_record()) == ["batch", "1", "1", "5", "0.5", "", "", "", ""]

    def test_floats_keep_full_precision(self):
        row = format_row(_record(phase=Phase.FINAL, train_loss=0.1 + 0.2, auc=0.75, wall_ms=12.5))
        assert row[0] == "final"
        assert float(row[4]) == 0.1 + 0.2
        assert row[6] == "0.75"
        assert row[8] == "12.5"


class TestCsvReport:
    def test_header_and_rows(self, tmp_path):
        path = tmp_path / "report.csv"
        with CsvReport(path) as report:
            report.write(_record())
            report.write(_record(phase=Phase.SERIAL, samples_seen=15, test_loss=0.25))
        assert report.rows == 2
        assert path.read_text().splitlines() == [
            "phase,epoch,rounds,samples_seen,train_loss,test_loss,auc,subopt,wall_ms",
            "batch,1,1,5,0.5,,,,",
            "serial,1,1,15,0.5,0.25,,,",
        ]

    def test_stdout(self, capsys):
        with CsvReport() as report:
            report.write(_record())
        assert capsys.readouterr().out.splitlines()[1] == "batch,1,1,5,0.5,,,,"

    def test_unwritable(self, tmp_path):
        with pytest.raises(DataIOError):
            CsvReport(tmp_path / "missing" / "report.csv")


class TestWeights:
    def test_dump_is_exact(self, tmp_path):
        path = tmp_path / "w.txt"
        w = np.array([0.1, -2.5, 1e-17, 0.0])
        write_weights(path, w)
        assert len(path.read_text().splitlines()) == 4
        np.testing.assert_array_equal(read_weights(path, 4), w)

    def test_dimension_mismatch(self, tmp_path):
        path = tmp_path / "w.txt"
        write_weights(path, np.zeros(3))
        with pytest.raises(DataIOError):
            read_weights(path, 4)

    def test_malformed(self, tmp_path):
        path = tmp_path / "w.txt"
        path.write_text("0.5\nabc\n")
        with pytest.raises(DataIOError):
            read_weights(path)


class TestSummary:
    def test_yaml(self, tmp_path, make_config):
        metrics = RunMetrics()
        metrics.count_batch(10)
        metrics.count_serial(4)
        metrics.records.append(_record(phase=Phase.FINAL, rounds=1, samples_seen=14))
        path = tmp_path / "summary.yaml"
        write_summary(path, make_config(seed=3), metrics)

        summary = yaml.safe_load(path.read_text())
        assert summary["rounds"] == 1
        assert summary["samples_seen"] == 14
        assert summary["config"]["algo"] == "svrg-ol"
        assert summary["config"]["seed"] == 3
        assert summary["final"]["phase"] == "final"
        assert not summary["diverged"]

    def test_without_records(self, make_config):
        assert run_summary(make_config(), RunMetrics())["final"] is None
