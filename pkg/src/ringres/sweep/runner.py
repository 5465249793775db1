"""
Grid sweep over (mean input power, pump detuning, carrier lifetime).

Every grid point is an independent work item: it runs the requested tasks for
each seed, the memory capacities, the nonlinear-detuning measurement and the
self-pulsing probe, and condenses them into one SweepResult. Points run in a
process pool; the parent is the only writer of the checkpoint.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np

from ringres.capacity import CapacityReport, total_memory_capacity
from ringres.cavity.feedback import detect_self_pulsing
from ringres.cavity.params import PhysicalParams
from ringres.cavity.state import DetuningTrace
from ringres.config import RunConfig
from ringres.errors import ConfigError, RingresError
from ringres.reservoir.detection import StateMatrix
from ringres.reservoir.mask import UNIPOLAR, Mask
from ringres.reservoir.modulation import ModulationConfig
from ringres.reservoir.runner import TimeDelayReservoir
from ringres.sweep.checkpoint import CheckpointStore
from ringres.sweep.grid import GridPoint
from ringres.sweep.results import CapacitySummary, SweepResult, TaskSummary, sigma_delta_nl
from ringres.tasks import instantiate_task
from ringres.tasks.base import Split, TaskDataset
from ringres.tasks.evaluation import TaskScore, evaluate_task
from ringres.telemetry import get_tracer

logger = logging.getLogger(__name__)
tracer = get_tracer()

CHECKPOINT_NAME = "checkpoint.jsonl"
# sweep entries that are measurements rather than task plugins
MEASUREMENTS = ("capacity", "detuning")


def benchmark_tasks(config: RunConfig) -> list[str]:
    return [name for name in config.grid.tasks if name not in MEASUREMENTS]


def check_tasks(config: RunConfig) -> None:
    """Raise ConfigError for any requested task that cannot be built or scored."""
    errors: list[str] = []

    def without_test(name: str) -> bool:
        split = getattr(instantiate_task(name, config.task_options.get(name, {})), "split", None)
        return isinstance(split, Split) and split.test == 0

    for name in benchmark_tasks(config):
        if without_test(name):
            errors.append(f"tasks.{name}.test must be > 0 to score {name}")
    if "capacity" in config.grid.tasks and without_test("narma10"):
        errors.append("tasks.narma10.test must be > 0: capacity is measured on its test drive")
    if errors:
        raise ConfigError("; ".join(errors), errors)


def narma_drive(config: RunConfig, seed: int) -> TaskDataset:
    task = instantiate_task("narma10", config.task_options.get("narma10", {}))
    return task.generate(seed)


def _summarize(scores: list[TaskScore]) -> TaskSummary:
    extras: dict[str, float] = {}
    for key in scores[0].extras:
        extras[key] = float(np.mean([s.extras[key] for s in scores]))
    return TaskSummary(
        metric=scores[0].metric,
        per_seed=tuple(s.value for s in scores),
        bias=tuple(s.bias for s in scores),
        ridge_lambda=tuple(s.ridge_lambda for s in scores),
        subsets=tuple(s.subset_values for s in scores),
        extras=extras,
    )


def capacity_run(
    config: RunConfig,
    params: PhysicalParams,
    modulation: ModulationConfig,
    seed: int,
    bias: float,
) -> tuple[CapacityReport, DetuningTrace]:
    drive = narma_drive(config, seed)
    train = drive.train_segment()
    test = drive.test_segments()[0]
    mask = Mask.generate(modulation.node_count, config.mask_seed + seed, UNIPOLAR)
    reservoir = TimeDelayReservoir(params, modulation.with_bias(bias), mask)

    scales: list[float] = []
    traces: list[DetuningTrace] = []

    def run_states(u: np.ndarray, warmup: int) -> StateMatrix:
        # the test segment reuses the power normalisation of the training segment
        run = reservoir.run(u, warmup, scale=scales[0] if scales else None)
        scales.append(run.scale)
        traces.append(run.detuning)
        return run.states

    report = total_memory_capacity(
        run_states, train.inputs, test.inputs, train.warmup, config.capacity
    )
    return report, DetuningTrace.concatenate(traces)


def _detuning_run(
    config: RunConfig,
    params: PhysicalParams,
    modulation: ModulationConfig,
    seed: int,
) -> DetuningTrace:
    drive = narma_drive(config, seed)
    mask = Mask.generate(modulation.node_count, config.mask_seed + seed, UNIPOLAR)
    reservoir = TimeDelayReservoir(params, modulation.with_bias(config.capacity_bias), mask)
    train = reservoir.run(drive.train_segment().inputs, drive.warmup_len)
    traces = [train.detuning]
    for segment in drive.test_segments():
        traces.append(reservoir.run(segment.inputs, segment.warmup, scale=train.scale).detuning)
    return DetuningTrace.concatenate(traces)


def probe_self_pulsing(
    config: RunConfig, params: PhysicalParams, point: GridPoint
) -> tuple[Optional[bool], Optional[float]]:
    pulsing = config.pulsing
    if not pulsing.enabled:
        return None, None
    return detect_self_pulsing(
        params,
        point.power_w,
        point.detuning_rad_s,
        settle=pulsing.settle_thermal_times * params.thermal_time,
        observe=pulsing.observe_thermal_times * params.thermal_time,
        sample_steps=pulsing.sample_steps,
        threshold=pulsing.threshold,
    )


def point_setup(config: RunConfig, point: GridPoint) -> tuple[PhysicalParams, ModulationConfig]:
    params = config.physical_params(point.carrier_lifetime, point.detuning_rad_s)
    return params, config.modulation.at(point.power_w, point.detuning_rad_s)


def _measure(point: GridPoint, config: RunConfig) -> SweepResult:
    params, modulation = point_setup(config, point)
    seeds = config.grid.seeds

    tasks: dict[str, TaskSummary] = {}
    narma_traces: list[DetuningTrace] = []
    for name in benchmark_tasks(config):
        task = instantiate_task(name, config.task_options.get(name, {}))
        scores: list[TaskScore] = []
        for seed in seeds:
            score = evaluate_task(
                task.generate(seed), params, modulation, config.mask_seed + seed, config.evaluation
            )
            logger.debug(f"{point.key} {name} seed {seed}: {score.metric}={score.value:.4g}")
            scores.append(score)
        tasks[name] = _summarize(scores)
        if name == "narma10":
            narma_traces = [s.detuning for s in scores]

    capacity: Optional[CapacitySummary] = None
    capacity_traces: list[DetuningTrace] = []
    if "capacity" in config.grid.tasks:
        narma = tasks.get("narma10")
        reports: list[CapacityReport] = []
        for i, seed in enumerate(seeds):
            bias = narma.bias[i] if narma is not None else config.capacity_bias
            report, trace = capacity_run(config, params, modulation, seed, bias)
            reports.append(report)
            capacity_traces.append(trace)
        capacity = CapacitySummary(
            orders={
                order: float(np.mean([r.sums[order] for r in reports]))
                for order in config.capacity.orders
            },
            per_seed=tuple(r.total for r in reports),
        )

    traces = narma_traces or capacity_traces
    if not traces:
        traces = [_detuning_run(config, params, modulation, seed) for seed in seeds]
    sigma = float(np.mean([sigma_delta_nl(trace) for trace in traces]))

    pulsing, depth = probe_self_pulsing(config, params, point)
    return SweepResult(
        point=point,
        tasks=tasks,
        capacity=capacity,
        sigma_delta_nl=sigma,
        oscillation_depth=depth,
        self_pulsing=pulsing,
    )


def evaluate_point(point: GridPoint, config: RunConfig) -> SweepResult:
    """One grid point; any simulator error gives a failed row instead of an exception."""
    started = time.perf_counter()
    with tracer.start_as_current_span("evaluate_point") as span:
        span.set_attribute("power_dbm", point.power_dbm)
        span.set_attribute("detuning_ghz", point.detuning_ghz)
        span.set_attribute("tau_fc", point.carrier_lifetime)
        try:
            result = _measure(point, config).with_region(config.region_a_sigma_hz)
        except RingresError as e:
            logger.error(f"Grid point {point.key} failed: {type(e).__name__}: {e}")
            result = SweepResult(point=point, status="failed", error=str(e))
        span.set_attribute("status", result.status)
        span.set_attribute("region", result.region)

    return replace(result, wall_time=time.perf_counter() - started)


def run_sweep(
    config: RunConfig,
    out_dir: Path,
    resume: bool = False,
    workers: int = 1,
) -> list[SweepResult]:
    """Evaluate every grid point not yet in the checkpoint; results in grid order."""
    check_tasks(config)
    store = CheckpointStore(out_dir / CHECKPOINT_NAME, config.config_hash, resume)
    points = list(config.grid.points())
    pending = [p for p in points if p.key not in store]
    logger.info(
        f"Sweep {config.config_hash[:12]}: {len(points)} grid points, "
        f"{len(points) - len(pending)} done, {len(pending)} to run with {workers} worker(s)"
    )

    def record(result: SweepResult) -> None:
        store.append(result)
        logger.info(
            f"[{len(store)}/{len(points)}] tau_fc={result.point.carrier_lifetime:.1e} "
            f"P={result.point.power_dbm:g} dBm detuning={result.point.detuning_ghz:g} GHz "
            f"{result.status} region={result.region}"
        )

    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(evaluate_point, p, config): p for p in pending}
            for future in as_completed(futures):
                record(future.result())
    else:
        for point in pending:
            record(evaluate_point(point, config))

    completed = store.completed()
    failed = sum(1 for p in points if completed[p.key].failed)
    logger.info(f"Sweep finished: {len(points)} grid points, {failed} failed")
    return [completed[p.key] for p in points]
