import pytest
from pydantic import ValidationError

from svrgol.cli.config import Algorithm, RunConfig, SyntheticSpec, build_config, load_config_file
from svrgol.driver.schedule import ScheduleMode
from svrgol.exceptions import ConfigError
from svrgol.learners.factory import LearnerKind


class TestSyntheticSpec:
    def test_defaults(self):
        spec = SyntheticSpec.parse("dim=20,n=100")
        assert (spec.dim, spec.n, spec.sparsity, spec.norm, spec.test) == (20, 100, 5, 3.0, 0)

    def test_sparsity_capped_by_dim(self):
        assert SyntheticSpec.parse("dim=3, n=10").sparsity == 3

    def test_full(self):
        spec = SyntheticSpec.parse("dim=20,n=16384,sparsity=7,norm=1.5,test=4096")
        assert (spec.sparsity, spec.norm, spec.test) == (7, 1.5, 4096)

    @pytest.mark.parametrize("text", ["dim=3,n=10,sparsity=4", "dim,n=10", "n=10", "dim=0,n=10"])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            SyntheticSpec.parse(text)


class TestRunConfig:
    def test_defaults(self, make_config):
        cfg = make_config()
        assert cfg.algo == Algorithm.SVRG_OL
        assert cfg.learner == LearnerKind.ADAGRAD
        assert cfg.schedule == ScheduleMode.PRACTICAL
        assert (cfg.t1, cfg.c, cfg.kmax, cfg.workers, cfg.seed) == (64, 100, 20, 1, 0)
        assert not cfg.compensate
        assert cfg.sparse_combine
        assert cfg.synthetic_spec.n == 256

    def test_needs_one_data_source(self, tmp_path):
        with pytest.raises(ValidationError):
            RunConfig()
        with pytest.raises(ValidationError):
            RunConfig(data=tmp_path / "train.svm", synthetic="dim=2,n=4")

    def test_test_file_needs_data_file(self):
        with pytest.raises(ValidationError):
            RunConfig(synthetic="dim=2,n=4", test="held_out.svm")

    def test_const_learner_needs_eta(self, make_config):
        with pytest.raises(ValidationError):
            make_config(learner="const")
        with pytest.raises(ValidationError):
            make_config(algo="svrg-const")
        assert make_config(algo="svrg-const", eta=0.1).learner_kind == LearnerKind.CONST

    @pytest.mark.parametrize("learner", ["adagrad", "coin"])
    def test_zero_eta_needs_constant_step(self, make_config, learner):
        with pytest.raises(ValidationError):
            make_config(learner=learner, eta=0.0)
        assert make_config(learner="const", eta=0.0).eta == 0.0
        assert make_config(algo="svrg-const", eta=0.0).learner_kind == LearnerKind.CONST

    def test_theory_needs_budget(self, make_config):
        with pytest.raises(ValidationError):
            make_config(schedule="theory")
        with pytest.raises(ValidationError):
            make_config(schedule="theory", t1=0, serial_budget=100)
        assert make_config(schedule="theory", serial_budget=100).serial_budget == 100

    def test_log_level(self, make_config):
        assert make_config(log_level="debug").log_level == "DEBUG"
        with pytest.raises(ValidationError):
            make_config(log_level="loud")

    def test_bad_synthetic(self):
        with pytest.raises(ValidationError):
            RunConfig(synthetic="dim=two,n=4")

    def test_unknown_key(self, make_config):
        with pytest.raises(ValidationError):
            make_config(learning_rate=0.1)


class TestConfigFile:
    def test_load(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("# experiment\nalgo = sgd\n--serial-budget = 100  # planned\n\nEta=0.5\n")
        assert load_config_file(path) == {"algo": "sgd", "serial_budget": "100", "eta": "0.5"}

    def test_malformed(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("algo sgd\n")
        with pytest.raises(ConfigError, match="run.conf:1"):
            load_config_file(path)

    def test_missing(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config_file(tmp_path / "absent.conf")


class TestBuildConfig:
    def test_precedence(self, tmp_path, monkeypatch):
        path = tmp_path / "run.conf"
        path.write_text("synthetic = dim=4,n=10\nt1 = 9\nc = 3\n")
        monkeypatch.setenv("SVRGOL_T1", "7")
        monkeypatch.setenv("SVRGOL_C", "5")
        monkeypatch.setenv("SVRGOL_KMAX", "2")

        cfg = build_config({"t1": "11"}, path)
        assert cfg.t1 == 11
        assert cfg.c == 3
        assert cfg.kmax == 2
        assert cfg.rho == 2.0

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("SVRGOL_SEED", "42")
        assert build_config({"synthetic": "dim=4,n=10"}).seed == 42

    def test_invalid(self):
        with pytest.raises(ConfigError, match="Invalid configuration"):
            build_config({"synthetic": "dim=4,n=10", "workers": "0"})
