"""
Result tables of a sweep.

- ``results.csv``: long format, one row per (grid point, reported quantity)
- ``matrix_<quantity>_tau<tau_fc>.csv``: power rows by detuning columns, for heatmaps
- ``manifest.yaml``: configuration hash, seeds and software version

Numbers are written with ``.10g`` and rows in grid order, so emitting the same
table twice gives identical bytes. Wall time stays in the checkpoint only.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

import yaml

from ringres import __version__
from ringres.config import RunConfig
from ringres.sweep.results import SweepResult
from ringres.types import Manifest

logger = logging.getLogger(__name__)

FAILED = "failed"
RESULTS_NAME = "results.csv"
MANIFEST_NAME = "manifest.yaml"
MATRIX_CORNER = "power_dbm\\detuning_ghz"

LONG_HEADER = (
    "tau_fc_s",
    "power_dbm",
    "detuning_ghz",
    "task",
    "metric",
    "mean",
    "std",
    "per_seed",
    "bias",
    "ridge_lambda",
    "sigma_delta_nl_hz",
    "oscillation_depth",
    "self_pulsing",
    "region",
    "status",
)


def fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return f"{value:.10g}"


def _joined(values: Iterable[float]) -> str:
    return ";".join(fmt(v) for v in values)


def _flag(value: Optional[bool]) -> str:
    return "" if value is None else str(value).lower()


class Quantity(NamedTuple):
    task: str
    metric: str
    mean: Optional[float]
    std: Optional[float] = None
    per_seed: str = ""
    bias: str = ""
    ridge_lambda: str = ""


def quantities(result: SweepResult) -> list[Quantity]:
    """Everything reported at one grid point."""
    rows: list[Quantity] = []
    for name, summary in sorted(result.tasks.items()):
        rows.append(
            Quantity(
                name,
                summary.metric,
                summary.mean,
                summary.std,
                _joined(summary.per_seed),
                _joined(summary.bias),
                _joined(summary.ridge_lambda),
            )
        )
        for key, value in sorted(summary.extras.items()):
            rows.append(Quantity(name, key, value))
    if result.capacity is not None:
        for order, value in sorted(result.capacity.orders.items()):
            rows.append(Quantity("capacity", f"c{order}", value))
        rows.append(
            Quantity(
                "capacity",
                "mc",
                result.capacity.total,
                result.capacity.std,
                _joined(result.capacity.per_seed),
            )
        )
    rows.append(Quantity("detuning", "sigma_delta_nl_hz", result.sigma_delta_nl))
    return rows


def _failed_quantities(tasks: Sequence[str]) -> list[tuple[str, str]]:
    rows = []
    for name in tasks:
        if name == "capacity":
            rows.append(("capacity", "mc"))
        elif name != "detuning":
            rows.append((name, FAILED))
    rows.append(("detuning", "sigma_delta_nl_hz"))
    return rows


def long_rows(results: Sequence[SweepResult], tasks: Sequence[str]) -> list[list[str]]:
    rows: list[list[str]] = []
    for result in results:
        point = result.point
        coords = [fmt(point.carrier_lifetime), fmt(point.power_dbm), fmt(point.detuning_ghz)]
        if result.failed:
            for name, metric in _failed_quantities(tasks):
                rows.append(
                    coords + [name, metric, FAILED] + [""] * 7 + [result.region, result.status]
                )
            continue
        for q in quantities(result):
            rows.append(
                coords
                + [
                    q.task,
                    q.metric,
                    fmt(q.mean),
                    fmt(q.std),
                    q.per_seed,
                    q.bias,
                    q.ridge_lambda,
                    fmt(result.sigma_delta_nl),
                    fmt(result.oscillation_depth),
                    _flag(result.self_pulsing),
                    result.region,
                    result.status,
                ]
            )
    return rows


def _matrix_key(name: str, metric: str) -> str:
    if name == "capacity":
        return metric
    if name == "detuning":
        return "sigma_delta_nl"
    if metric in ("nmse", "accuracy", "ser"):
        return name
    return f"{name}_{metric}"


def _cell(value: Optional[float], log10: bool) -> str:
    if value is None:
        return ""
    if log10:
        return fmt(math.log10(value)) if value > 0 else "-inf"
    return fmt(value)


def matrices(
    results: Sequence[SweepResult],
    log10_metrics: Sequence[str] = (),
) -> dict[tuple[str, float], list[list[str]]]:
    """Heatmap tables per (quantity, tau_fc), including the region labels."""
    cells: dict[tuple[str, float], dict[tuple[float, float], str]] = {}
    axes: dict[float, tuple[set[float], set[float]]] = {}
    for result in results:
        point = result.point
        powers, detunings = axes.setdefault(point.carrier_lifetime, (set(), set()))
        powers.add(point.power_dbm)
        detunings.add(point.detuning_ghz)
        at = (point.power_dbm, point.detuning_ghz)
        cells.setdefault(("region", point.carrier_lifetime), {})[at] = result.region
        if result.failed:
            continue
        for q in quantities(result):
            key = _matrix_key(q.task, q.metric)
            log10 = key in log10_metrics or q.task in log10_metrics
            quantity = f"log10_{key}" if log10 else key
            cells.setdefault((quantity, point.carrier_lifetime), {})[at] = _cell(q.mean, log10)

    failed = {
        (r.point.carrier_lifetime, r.point.power_dbm, r.point.detuning_ghz)
        for r in results
        if r.failed
    }
    tables: dict[tuple[str, float], list[list[str]]] = {}
    for (quantity, tau), values in sorted(cells.items()):
        powers, detunings = axes[tau]
        table = [[MATRIX_CORNER] + [fmt(d) for d in sorted(detunings)]]
        for power in sorted(powers):
            row = [fmt(power)]
            for detuning in sorted(detunings):
                if quantity != "region" and (tau, power, detuning) in failed:
                    row.append(FAILED)
                else:
                    row.append(values.get((power, detuning), ""))
            table.append(row)
        tables[(quantity, tau)] = table
    return tables


def matrix_name(quantity: str, tau: float) -> str:
    return f"matrix_{quantity}_tau{fmt(tau)}.csv"


def _write_csv(path: Path, rows: Iterable[Sequence[str]]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerows(rows)
    return path


def build_manifest(results: Sequence[SweepResult], config: RunConfig) -> Manifest:
    return Manifest(
        config_hash=config.config_hash,
        version=__version__,
        seeds=list(config.grid.seeds),
        carrier_lifetimes=list(config.grid.carrier_lifetimes),
        points=len(results),
        failed_points=sum(1 for r in results if r.failed),
        tasks=list(config.grid.tasks),
    )


def emit_results(results: Sequence[SweepResult], out_dir: Path, config: RunConfig) -> list[Path]:
    """Write the long table, the heatmap matrices and the manifest into ``out_dir``."""
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        written = [
            _write_csv(
                out_dir / RESULTS_NAME,
                [list(LONG_HEADER)] + long_rows(results, config.grid.tasks),
            )
        ]
        for (quantity, tau), table in matrices(results, config.log10_metrics).items():
            written.append(_write_csv(out_dir / matrix_name(quantity, tau), table))
        manifest_path = out_dir / MANIFEST_NAME
        manifest_path.write_text(
            yaml.safe_dump(dict(build_manifest(results, config)), sort_keys=False),
            encoding="utf-8",
        )
        written.append(manifest_path)
    except OSError as e:
        logger.error(f"Failed to write results to {out_dir}: {e}")
        raise
    logger.info(f"Wrote {len(written)} result files to {out_dir}")
    return written
