from __future__ import annotations

import logging
import math
import time
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from svrgol.cli.config import Algorithm, RunConfig
from svrgol.data.dataset import Dataset
from svrgol.data.sampler import StreamSampler
from svrgol.driver.metrics import EpochRecord, Phase, RunMetrics
from svrgol.driver.schedule import EpochSchedule, ScheduleMode, next_epoch
from svrgol.evaluation import average_loss, dataset_auc, suboptimality
from svrgol.exceptions import DivergenceError, InvalidArgumentError, InvalidStateError
from svrgol.learners.base import OnlineLearner, bias_compensate
from svrgol.learners.factory import LearnerFactory, LearnerKind
from svrgol.linalg import DenseVector, check_dims
from svrgol.losses import ProblemMeta, estimate_constants, logistic_grad
from svrgol.vr.anchor import AnchorState
from svrgol.vr.batch import batch_gradient, stream_batch_gradient
from svrgol.vr.combine import combine_dense, combine_sparse
from svrgol.vr.sizing import bias_bound

logger = logging.getLogger(__name__)

RecordHook = Callable[[EpochRecord], None]
RunResult = Tuple[DenseVector, RunMetrics]

DIVERGENCE_FACTOR = 10.0
DEFAULT_EVAL_EVERY = 64


class IterateAverage:
    """Running coordinatewise mean, summed in arrival order."""

    def __init__(self, dim: int) -> None:
        self._sum = np.zeros(dim)
        self.count = 0

    def add(self, w: DenseVector) -> None:
        self._sum += w
        self.count += 1

    def mean(self) -> DenseVector:
        if self.count == 0:
            raise InvalidStateError("No iterates to average")
        return self._sum / self.count


def anchor_average(iterates: Sequence[DenseVector]) -> DenseVector:
    if len(iterates) == 0:
        raise InvalidArgumentError("Cannot average an empty sequence of iterates")
    average = IterateAverage(len(iterates[0]))
    for w in iterates:
        check_dims(w, iterates[0])
        average.add(np.asarray(w, dtype=np.float64))
    return average.mean()


def build_schedule(cfg: RunConfig) -> EpochSchedule:
    if not cfg.schedule.geometric:
        return EpochSchedule(ScheduleMode.PRACTICAL, cfg.t1, cfg.kmax, C=cfg.c)
    if cfg.serial_budget is not None:
        return EpochSchedule.geometric(cfg.schedule, cfg.t1, cfg.serial_budget, cfg.rho, cfg.nhat)
    if cfg.budget is not None:
        return EpochSchedule.plan_from_budget(cfg.schedule, cfg.t1, cfg.budget, cfg.rho, cfg.nhat)
    return EpochSchedule(cfg.schedule, cfg.t1, cfg.kmax, rho=cfg.rho, nhat=cfg.nhat)


def baseline_budget(cfg: RunConfig) -> int:
    """Samples the baselines may consume: the explicit budget, else what svrg-ol would use."""
    if cfg.budget is not None:
        return cfg.budget
    return build_schedule(cfg).total_samples()


class _Monitor:
    """Evaluates report rows at the averaged iterate and watches for divergence."""

    def __init__(
        self,
        cfg: RunConfig,
        data: Dataset,
        test: Optional[Dataset],
        metrics: RunMetrics,
        w_star: Optional[DenseVector],
        on_record: Optional[RecordHook],
        w_initial: DenseVector,
    ) -> None:
        self.data = data
        self.test = test
        self.metrics = metrics
        self.w_star = w_star
        self.on_record = on_record
        self.timing = cfg.timing
        self.started = time.perf_counter()
        self.initial_loss = average_loss(w_initial, data)

    def check_iterate(self, w: DenseVector, epoch: int, step: int) -> None:
        if not np.all(np.isfinite(w)):
            self.metrics.diverged = True
            raise DivergenceError("non-finite iterate", epoch, self.metrics, step=step)

    def _blew_up(self, loss: float) -> bool:
        return not math.isfinite(loss) or (self.initial_loss > 0 and loss > DIVERGENCE_FACTOR * self.initial_loss)

    def record(
        self, phase: Phase, epoch: int, w: DenseVector, current: Optional[DenseVector] = None
    ) -> EpochRecord:
        """Append a row for ``w``; ``current`` is the learner's last iterate, checked for blow-up too."""
        train_loss = average_loss(w, self.data)
        record = EpochRecord(
            phase=phase,
            epoch=epoch,
            rounds=self.metrics.rounds,
            samples_seen=self.metrics.samples_seen,
            train_loss=train_loss,
            test_loss=average_loss(w, self.test) if self.test is not None else None,
            auc=dataset_auc(w, self.test if self.test is not None else self.data),
            subopt=suboptimality(w, self.data, self.w_star) if self.w_star is not None else None,
            wall_ms=(time.perf_counter() - self.started) * 1000.0 if self.timing else None,
        )
        self.metrics.records.append(record)
        if self.on_record is not None:
            self.on_record(record)
        if self._blew_up(train_loss):
            self.metrics.diverged = True
            logger.error("Train loss %s exceeds %sx the initial %s", train_loss, DIVERGENCE_FACTOR, self.initial_loss)
            raise DivergenceError("train loss blew up", epoch, self.metrics, loss=train_loss)
        if current is not None:
            current_loss = average_loss(current, self.data)
            if self._blew_up(current_loss):
                self.metrics.diverged = True
                logger.error(
                    "Last-iterate loss %s exceeds %sx the initial %s",
                    current_loss,
                    DIVERGENCE_FACTOR,
                    self.initial_loss,
                )
                raise DivergenceError("last iterate loss blew up", epoch, self.metrics, loss=current_loss)
        return record


def _create_learner(cfg: RunConfig, meta: ProblemMeta, kind: LearnerKind, bias: float = 0.0) -> OnlineLearner:
    return LearnerFactory.create(
        kind,
        meta.dim,
        meta.G,
        eta=cfg.eta,
        epsilon=cfg.epsilon,
        diameter=cfg.diameter,
        bias_bound=bias,
    )


def _run_variance_reduced(
    cfg: RunConfig,
    data: Dataset,
    test: Optional[Dataset],
    w_star: Optional[DenseVector],
    on_record: Optional[RecordHook],
    learner: Optional[OnlineLearner],
    exact_anchor: bool,
) -> RunResult:
    meta = estimate_constants(data, cfg.diameter)
    schedule = build_schedule(cfg)
    planned_serial = sum(t for t, _ in schedule.epochs())
    delta = 1.0 / planned_serial if planned_serial > 1 else 0.5

    # compensation applies to unbounded D only; a finite D projects instead
    compensate = cfg.compensate and not math.isfinite(cfg.diameter)
    if cfg.compensate and not compensate:
        logger.warning("Ignoring bias compensation: iterates are projected onto a ball of diameter %s", cfg.diameter)

    def compensation(nhat: int) -> float:
        if not compensate:
            return 0.0
        return bias_bound(meta.G, schedule.K_max, delta, nhat)

    initial_bias = compensation(len(data) if exact_anchor else next_epoch(schedule, 1)[1])
    if learner is None:
        learner = _create_learner(cfg, meta, cfg.learner_kind, initial_bias)
    batch_sampler, serial_sampler = StreamSampler(data, cfg.seed).spawn(2)

    metrics = RunMetrics(bias_bound=initial_bias)
    v = learner.current()
    monitor = _Monitor(cfg, data, test, metrics, w_star, on_record, v)
    overall = IterateAverage(meta.dim)
    logger.info(
        "Starting %s: %s schedule, K_max=%s, learner=%s, workers=%s",
        cfg.algo.value,
        schedule.mode.value,
        schedule.K_max,
        type(learner).__name__,
        cfg.workers,
    )

    try:
        for k in range(1, schedule.K_max + 1):
            serial_steps, nhat = next_epoch(schedule, k)
            batch_size = len(data) if exact_anchor else nhat
            if cfg.budget is not None and metrics.samples_seen + batch_size + serial_steps > cfg.budget:
                metrics.stopped_early = True
                logger.warning("Sample budget %s reached before epoch %s; stopping", cfg.budget, k)
                break

            if exact_anchor:
                batch_grad, stats = batch_gradient(v, data, cfg.workers, cfg.block_size)
            else:
                batch_grad, stats = stream_batch_gradient(v, batch_sampler, nhat, cfg.workers, cfg.block_size)
            metrics.count_batch(batch_size)
            anchor = AnchorState(v, batch_grad, k, batch_size, stats)
            if cfg.sparse_combine and stats.floor_hits():
                logger.debug("Epoch %s: %s coordinates at the probability floor", k, stats.floor_hits())
            logger.info(
                "Epoch %s: batch of %s at round %s, %s serial steps", k, batch_size, metrics.rounds, serial_steps
            )
            monitor.record(Phase.BATCH, k, overall.mean() if overall.count else v)

            B = compensation(anchor.batch_size_used)
            epoch_average = IterateAverage(meta.dim)
            for step in range(serial_steps):
                w = learner.current()
                monitor.check_iterate(w, k, step)
                epoch_average.add(w)
                overall.add(w)
                example = serial_sampler.next_sample()
                grad_w = logistic_grad(w, example)
                grad_anchor = logistic_grad(anchor.v, example)
                if cfg.sparse_combine:
                    g = combine_sparse(grad_w, grad_anchor, anchor.batch_grad, anchor.stats)
                else:
                    g = combine_dense(grad_w, grad_anchor, anchor.batch_grad)
                if B:
                    g = bias_compensate(g, w, B)
                learner.step(g)
                metrics.count_serial()

            if epoch_average.count:
                v = epoch_average.mean()
            metrics.clip_count = learner.clip_count
            monitor.record(Phase.SERIAL, k, overall.mean() if overall.count else v, current=learner.current())
    finally:
        metrics.clip_count = learner.clip_count

    w_bar = overall.mean() if overall.count else learner.current()
    monitor.record(Phase.FINAL, len([r for r in metrics.records if r.phase == Phase.BATCH]), w_bar)
    if metrics.clip_count:
        logger.warning("%s gradient coordinates were clipped", metrics.clip_count)
    logger.info("Finished after %s rounds and %s samples", metrics.rounds, metrics.samples_seen)
    return w_bar, metrics


def run_svrg_ol(
    cfg: RunConfig,
    data: Dataset,
    test: Optional[Dataset] = None,
    *,
    w_star: Optional[DenseVector] = None,
    on_record: Optional[RecordHook] = None,
    learner: Optional[OnlineLearner] = None,
    exact_anchor: bool = False,
) -> RunResult:
    """Variance-reduced gradients fed to an online learner, epoch by epoch.

    Each epoch computes a batch gradient at the anchor in parallel (one round),
    then runs the serial phase; the next anchor is the epoch's mean iterate.
    Returns the mean of all serial iterates. ``exact_anchor`` replaces the
    sampled anchor batch by the whole dataset.
    """
    return _run_variance_reduced(cfg, data, test, w_star, on_record, learner, exact_anchor)


def run_classic_svrg(
    cfg: RunConfig,
    data: Dataset,
    test: Optional[Dataset] = None,
    *,
    w_star: Optional[DenseVector] = None,
    on_record: Optional[RecordHook] = None,
    exact_anchor: bool = False,
) -> RunResult:
    """The same loop pinned to the constant-step learner with compensation off."""
    if cfg.eta is None:
        raise InvalidArgumentError("Classic SVRG needs an explicit eta")
    pinned = cfg.model_copy(update={"algo": Algorithm.SVRG_CONST, "learner": LearnerKind.CONST, "compensate": False})
    return _run_variance_reduced(pinned, data, test, w_star, on_record, None, exact_anchor)


def _eval_every(cfg: RunConfig) -> int:
    if cfg.eval_every is not None:
        return cfg.eval_every
    return cfg.t1 if cfg.t1 > 0 else DEFAULT_EVAL_EVERY


def run_serial_sgd(
    cfg: RunConfig,
    data: Dataset,
    test: Optional[Dataset] = None,
    *,
    w_star: Optional[DenseVector] = None,
    on_record: Optional[RecordHook] = None,
) -> RunResult:
    meta = estimate_constants(data, cfg.diameter)
    learner = _create_learner(cfg, meta, cfg.learner)
    sampler = StreamSampler(data, cfg.seed)
    budget = baseline_budget(cfg)
    every = _eval_every(cfg)

    metrics = RunMetrics()
    monitor = _Monitor(cfg, data, test, metrics, w_star, on_record, learner.current())
    average = IterateAverage(meta.dim)
    logger.info("Starting serial SGD: %s samples, learner=%s", budget, type(learner).__name__)

    try:
        for step in range(1, budget + 1):
            w = learner.current()
            monitor.check_iterate(w, step // every, step)
            average.add(w)
            learner.step(logistic_grad(w, sampler.next_sample()))
            metrics.count_serial()
            if step % every == 0 and step != budget:
                monitor.record(Phase.STEP, step // every, average.mean())
    finally:
        metrics.clip_count = learner.clip_count

    w_bar = average.mean() if average.count else learner.current()
    monitor.record(Phase.FINAL, math.ceil(budget / every), w_bar)
    return w_bar, metrics


def run_minibatch_sgd(
    cfg: RunConfig,
    data: Dataset,
    test: Optional[Dataset] = None,
    *,
    w_star: Optional[DenseVector] = None,
    on_record: Optional[RecordHook] = None,
    full_batch: bool = False,
) -> RunResult:
    """One learner step per round on the mean gradient of ``b`` fresh samples.

    ``full_batch`` uses the whole dataset as every round's batch, which turns
    the loop into deterministic gradient descent.
    """
    meta = estimate_constants(data, cfg.diameter)
    learner = _create_learner(cfg, meta, cfg.learner)
    sampler = StreamSampler(data, cfg.seed)
    budget = baseline_budget(cfg)
    if full_batch:
        size = len(data)
    else:
        size = cfg.batch if cfg.batch is not None else math.ceil(math.sqrt(budget))
    total_rounds = math.ceil(budget / size)
    every = math.ceil(_eval_every(cfg) / size)

    metrics = RunMetrics()
    monitor = _Monitor(cfg, data, test, metrics, w_star, on_record, learner.current())
    average = IterateAverage(meta.dim)
    logger.info("Starting minibatch SGD: %s samples in %s rounds of %s", budget, total_rounds, size)

    try:
        for round_index in range(1, total_rounds + 1):
            w = learner.current()
            monitor.check_iterate(w, round_index // every, round_index)
            average.add(w)
            if full_batch:
                count = size
                gradient, _ = batch_gradient(w, data, cfg.workers, cfg.block_size)
            else:
                count = min(size, budget - metrics.samples_seen)
                gradient, _ = stream_batch_gradient(w, sampler, count, cfg.workers, cfg.block_size)
            learner.step(gradient)
            metrics.count_batch(count)
            if round_index % every == 0 and round_index != total_rounds:
                monitor.record(Phase.STEP, round_index // every, average.mean())
    finally:
        metrics.clip_count = learner.clip_count

    w_bar = average.mean() if average.count else learner.current()
    monitor.record(Phase.FINAL, math.ceil(total_rounds / every), w_bar)
    return w_bar, metrics


def run(cfg: RunConfig, data: Dataset, test: Optional[Dataset] = None, **kwargs) -> RunResult:
    """Dispatch on ``cfg.algo``."""
    if cfg.algo == Algorithm.SVRG_OL:
        return run_svrg_ol(cfg, data, test, **kwargs)
    if cfg.algo == Algorithm.SVRG_CONST:
        return run_classic_svrg(cfg, data, test, **kwargs)
    if cfg.algo == Algorithm.SGD:
        return run_serial_sgd(cfg, data, test, **kwargs)
    if cfg.algo == Algorithm.MINIBATCH:
        return run_minibatch_sgd(cfg, data, test, **kwargs)
    raise InvalidArgumentError(f"Unknown algorithm: {cfg.algo}")
