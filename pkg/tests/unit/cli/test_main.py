import pytest
import yaml

from svrgol.cli.main import EXIT_CONFIG, EXIT_DATA, EXIT_DIVERGED, EXIT_OK, build_parser, main
from svrgol.data.libsvm import write_libsvm
from svrgol.data.synthetic import gen_problem


def _rows(path):
    return [line.split(",") for line in path.read_text().splitlines()[1:]]


class TestParser:
    def test_flags_become_config_keys(self):
        args = build_parser().parse_args(["--serial-budget", "10", "--no-sparse-combine", "--log-level", "debug"])
        assert args.serial_budget == "10"
        assert args.sparse_combine is False
        assert args.log_level == "DEBUG"
        assert args.compensate is None

    def test_unknown_choice(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["--learner", "newton"])


class TestMain:
    def test_practical_run(self, tmp_path):
        out = tmp_path / "report.csv"
        weights = tmp_path / "w.txt"
        summary = tmp_path / "summary.yaml"
        code = main(
            [
                "--synthetic", "dim=5,n=200,test=50",
                "--t1", "10", "--kmax", "3", "--c", "20",
                "--out", str(out),
                "--weights-out", str(weights),
                "--summary-out", str(summary),
            ]
        )
        assert code == EXIT_OK
        rows = _rows(out)
        assert len(rows) == 7
        assert [r[0] for r in rows] == ["batch", "serial"] * 3 + ["final"]
        assert all(r[5] != "" for r in rows)
        assert len(weights.read_text().splitlines()) == 5
        assert yaml.safe_load(summary.read_text())["rounds"] == 3

    def test_output_is_reproducible_across_workers(self, tmp_path):
        outputs = []
        for workers in ("1", "4"):
            out = tmp_path / f"report-{workers}.csv"
            argv = ["--synthetic", "dim=6,n=300", "--t1", "16", "--kmax", "3", "--c", "50"]
            assert main(argv + ["--block-size", "16", "--workers", workers, "--out", str(out)]) == EXIT_OK
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_theory_rounds(self, tmp_path):
        out = tmp_path / "report.csv"
        argv = ["--synthetic", "dim=4,n=100", "--schedule", "theory", "--t1", "64", "--serial-budget", "8192"]
        assert main(argv + ["--nhat", "4", "--out", str(out)]) == EXIT_OK
        rows = _rows(out)
        assert rows[-1][0] == "final"
        assert rows[-1][2] == "8"
        assert rows[-1][3] == str(8192 + 8 * 4)

    def test_libsvm_input(self, tmp_path):
        train, _, _ = gen_problem(dim=4, n=60, sparsity=2, norm=2.0, seed=1)
        data = tmp_path / "train.svm"
        write_libsvm(data, train)
        out = tmp_path / "report.csv"
        argv = ["--data", str(data), "--hash-bits", "8", "--t1", "5", "--kmax", "2", "--c", "10"]
        assert main(argv + ["--out", str(out)]) == EXIT_OK
        assert len(_rows(out)) == 5

    def test_config_error(self, tmp_path):
        assert main(["--t1", "5"]) == EXIT_CONFIG
        assert main(["--synthetic", "dim=4,n=10", "--learner", "const"]) == EXIT_CONFIG
        assert main(["--config", str(tmp_path / "absent.conf")]) == EXIT_CONFIG

    @pytest.mark.parametrize("learner", ["adagrad", "coin"])
    def test_zero_eta_is_a_config_error(self, learner):
        assert main(["--synthetic", "dim=4,n=10", "--learner", learner, "--eta", "0"]) == EXIT_CONFIG

    @pytest.mark.parametrize("algo", ["svrg-ol", "sgd", "minibatch"])
    def test_rows_are_monotone(self, tmp_path, algo):
        out = tmp_path / "report.csv"
        argv = ["--synthetic", "dim=5,n=200", "--algo", algo, "--t1", "10", "--kmax", "4", "--c", "20"]
        assert main(argv + ["--eval-every", "15", "--out", str(out)]) == EXIT_OK
        rows = _rows(out)
        assert len(rows) > 2
        rounds = [int(r[2]) for r in rows]
        samples = [int(r[3]) for r in rows]
        assert rounds == sorted(rounds)
        assert samples == sorted(samples)
        assert samples[-1] > samples[0]

    def test_missing_data(self, tmp_path):
        assert main(["--data", str(tmp_path / "absent.svm"), "--hash-bits", "8"]) == EXIT_DATA

    def test_malformed_data(self, tmp_path):
        data = tmp_path / "train.svm"
        data.write_text("+1 1:0.5\nyes 2:x\n")
        assert main(["--data", str(data), "--hash-bits", "8"]) == EXIT_DATA

    def test_divergence(self, tmp_path):
        summary = tmp_path / "summary.yaml"
        argv = ["--synthetic", "dim=5,n=200", "--learner", "const", "--eta", "1e6", "--t1", "10", "--kmax", "3"]
        code = main(argv + ["--c", "5", "--out", str(tmp_path / "report.csv"), "--summary-out", str(summary)])
        assert code == EXIT_DIVERGED
        assert yaml.safe_load(summary.read_text())["diverged"] is True

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["--version"])
        assert exc_info.value.code == 0
        assert capsys.readouterr().out.startswith("svrgol ")
