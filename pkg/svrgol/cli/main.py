from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional, Tuple

from svrgol.__version__ import version
from svrgol.cli.config import Algorithm, LOG_LEVELS, RunConfig, build_config
from svrgol.cli.output import CsvReport, read_weights, write_summary, write_weights
from svrgol.data.dataset import Dataset
from svrgol.data.libsvm import load_libsvm
from svrgol.data.synthetic import gen_problem
from svrgol.driver.runner import run
from svrgol.driver.schedule import ScheduleMode
from svrgol.exceptions import ConfigError, DataIOError, DivergenceError, ParseError, SvrgOlError
from svrgol.learners.factory import LearnerKind

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DIVERGED = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svrgol",
        description="Variance-reduced online learning experiments on logistic regression.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {version}")
    parser.add_argument("--config", help="flat key = value file; command-line flags take precedence")

    run_group = parser.add_argument_group("algorithm")
    run_group.add_argument("--algo", choices=[a.value for a in Algorithm])
    run_group.add_argument("--learner", choices=[k.value for k in LearnerKind])
    run_group.add_argument("--schedule", choices=[m.value for m in ScheduleMode])
    run_group.add_argument("--t1", help="serial steps of the first epoch")
    run_group.add_argument("--c", help="batch growth constant of the practical schedule")
    run_group.add_argument("--kmax", help="maximum number of epochs")
    run_group.add_argument("--nhat", help="fixed batch size")
    run_group.add_argument("--budget", help="total sample budget")
    run_group.add_argument("--serial-budget", help="planned serial steps of the theory schedules")
    run_group.add_argument("--batch", help="minibatch size")
    run_group.add_argument("--rho", help="serial phase growth ratio")
    run_group.add_argument("--eta", help="step size")
    run_group.add_argument("--diameter", help="diameter of the feasible ball")
    run_group.add_argument("--epsilon", help="AdaGrad denominator offset")
    run_group.add_argument("--compensate", action=argparse.BooleanOptionalAction, default=None)
    run_group.add_argument("--sparse-combine", action=argparse.BooleanOptionalAction, default=None)
    run_group.add_argument("--workers", help="batch phase worker threads")
    run_group.add_argument("--block-size", help="leaf block size of the gradient tree")
    run_group.add_argument("--seed")

    data_group = parser.add_argument_group("data")
    data_group.add_argument("--data", help="training data, LibSVM format")
    data_group.add_argument("--test", help="held-out data, LibSVM format")
    data_group.add_argument("--synthetic", help="e.g. dim=20,n=16384,sparsity=5,norm=3,test=4096")
    data_group.add_argument("--hash-bits")

    output_group = parser.add_argument_group("output")
    output_group.add_argument("--out", help="CSV path, stdout when omitted")
    output_group.add_argument("--eval-every", help="serial steps between baseline report rows")
    output_group.add_argument("--w-star", help="weight dump of the optimum for the subopt column")
    output_group.add_argument("--weights-out")
    output_group.add_argument("--summary-out")
    output_group.add_argument("--timing", action="store_const", const=True, default=None)
    output_group.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS)
    return parser


def load_data(cfg: RunConfig) -> Tuple[Dataset, Optional[Dataset]]:
    spec = cfg.synthetic_spec
    if spec is not None:
        assert spec.sparsity is not None
        train, test, _ = gen_problem(spec.dim, spec.n, spec.sparsity, spec.norm, cfg.seed, spec.test)
        logger.info("Generated synthetic problem: %s train, %s test, dim %s", spec.n, spec.test, spec.dim)
        return train, test
    assert cfg.data is not None
    train = load_libsvm(cfg.data, cfg.hash_bits)
    test = load_libsvm(cfg.test, cfg.hash_bits) if cfg.test is not None else None
    return train, test


def run_experiment(cfg: RunConfig) -> int:
    """Run the configured algorithm, stream the CSV report and return the exit code."""
    try:
        data, test = load_data(cfg)
        w_star = read_weights(cfg.w_star, data.dim) if cfg.w_star is not None else None
    except (DataIOError, ParseError) as exc:
        logger.error("Cannot load data: %s", exc)
        return EXIT_DATA

    try:
        report = CsvReport(cfg.out)
    except DataIOError as exc:
        logger.error("%s", exc)
        return EXIT_DATA

    with report:
        try:
            w, metrics = run(cfg, data, test, w_star=w_star, on_record=report.write)
        except DivergenceError as exc:
            logger.error("Run aborted: %s", exc.as_payload())
            if cfg.summary_out is not None and exc.metrics is not None:
                write_summary(cfg.summary_out, cfg, exc.metrics)
            return EXIT_DIVERGED
        except SvrgOlError as exc:
            logger.error("Run failed: %s", exc)
            return EXIT_FAILURE

    try:
        if cfg.weights_out is not None:
            write_weights(cfg.weights_out, w)
        if cfg.summary_out is not None:
            write_summary(cfg.summary_out, cfg, metrics)
    except DataIOError as exc:
        logger.error("%s", exc)
        return EXIT_DATA
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {key: value for key, value in vars(args).items() if key != "config" and value is not None}
    try:
        cfg = build_config(overrides, args.config)
    except ConfigError as exc:
        logging.basicConfig(level=logging.INFO, stream=sys.stderr)
        logger.error("%s", exc)
        return EXIT_CONFIG

    logging.basicConfig(
        level=cfg.log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    return run_experiment(cfg)


if __name__ == "__main__":
    sys.exit(main())
