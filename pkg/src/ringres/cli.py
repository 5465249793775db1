import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import yaml

from ringres import __version__
from ringres.cavity.trace import write_trace_csv
from ringres.config import RunConfig, build_config, deep_merge, dump_defaults, load_document
from ringres.errors import RingresError
from ringres.reservoir.mask import UNIPOLAR, Mask
from ringres.reservoir.runner import TimeDelayReservoir
from ringres.settings import load_core_settings, validate
from ringres.sweep.emit import emit_results
from ringres.sweep.grid import GridPoint
from ringres.sweep.runner import (
    capacity_run,
    evaluate_point,
    narma_drive,
    point_setup,
    probe_self_pulsing,
    run_sweep,
)
from ringres.telemetry import configure_tracing

logger = logging.getLogger(__name__)

BENCHMARKS = ("narma10", "classify", "equalize", "radar")


def _point_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="YAML run configuration")
    parser.add_argument("--pin", type=float, required=True, help="Mean input power in dBm")
    parser.add_argument("--detuning", type=float, required=True, help="Pump detuning in GHz")
    parser.add_argument("--tau-fc", type=float, required=True, help="Free-carrier lifetime in s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringres",
        description="Microring time-delay reservoir simulator and parameter sweeps",
    )
    parser.add_argument("--version", action="version", version=f"ringres {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    sweep = commands.add_parser("sweep", help="Full (power, detuning, tau_fc) grid sweep")
    sweep.add_argument("--config", type=Path, default=None, help="YAML run configuration")
    sweep.add_argument("--out", type=Path, required=True, help="Output directory")
    sweep.add_argument(
        "--resume", action="store_true", help="Skip grid points already in the checkpoint"
    )
    sweep.add_argument("--workers", type=int, default=None, help="Worker processes")

    cut = commands.add_parser("cut", help="Detuning cut at one input power")
    cut.add_argument("--config", type=Path, default=None, help="YAML run configuration")
    cut.add_argument("--pin", type=float, required=True, help="Mean input power in dBm")
    cut.add_argument(
        "--tau-fc", type=float, nargs="+", default=None, help="Free-carrier lifetimes in s"
    )
    cut.add_argument("--tasks", nargs="+", default=None, help="Sweep entries to run")
    cut.add_argument("--out", type=Path, required=True, help="Output directory")
    cut.add_argument("--resume", action="store_true")
    cut.add_argument("--workers", type=int, default=None)

    task = commands.add_parser("task", help="One benchmark at one operating point")
    task.add_argument("name", choices=BENCHMARKS)
    _point_arguments(task)
    task.add_argument("--seeds", type=int, default=None, help="Number of seeds")
    task.add_argument("--no-pulsing", action="store_true", help="Skip the self-pulsing probe")

    capacity = commands.add_parser("capacity", help="Memory capacity curves at one point")
    _point_arguments(capacity)
    capacity.add_argument("--seed", type=int, default=0)
    capacity.add_argument("--bias", type=float, default=None, help="Input bias")
    capacity.add_argument("--out", type=Path, default=None, help="CSV of C_i[k]")

    trace = commands.add_parser("trace", help="Drop power and delta_NL time trace")
    _point_arguments(trace)
    trace.add_argument("--seed", type=int, default=0)
    trace.add_argument("--bias", type=float, default=None, help="Input bias")
    trace.add_argument("--out", type=Path, required=True, help="Trace CSV")

    pulsing = commands.add_parser("pulsing", help="Self-pulsing probe at constant input power")
    _point_arguments(pulsing)

    config = commands.add_parser("config", help="Show or check run configurations")
    group = config.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--dump-defaults", action="store_true", help="Print the default configuration"
    )
    group.add_argument("--check", type=Path, help="Validate a file and print it merged")
    return parser


def _document(path: Optional[Path], **sweep: Any) -> dict[str, Any]:
    overrides = {k: v for k, v in sweep.items() if v is not None}
    return deep_merge(load_document(path), {"sweep": overrides})


def _point_config(args: argparse.Namespace, **sweep: Any) -> tuple[RunConfig, GridPoint]:
    config = build_config(
        _document(
            args.config,
            power_dbm=[args.pin],
            detuning_ghz=[args.detuning],
            carrier_lifetimes=[args.tau_fc],
            **sweep,
        )
    )
    return config, next(config.grid.points())


def _print_yaml(data: Any) -> None:
    sys.stdout.write(yaml.safe_dump(data, sort_keys=False))


def _workers(args: argparse.Namespace, default: int) -> int:
    return args.workers if args.workers is not None else default


def cmd_sweep(args: argparse.Namespace, workers: int) -> int:
    config = build_config(load_document(args.config))
    results = run_sweep(config, args.out, resume=args.resume, workers=_workers(args, workers))
    emit_results(results, args.out, config)
    return 0


def cmd_cut(args: argparse.Namespace, workers: int) -> int:
    config = build_config(
        _document(
            args.config,
            power_dbm=[args.pin],
            carrier_lifetimes=args.tau_fc,
            tasks=args.tasks,
        )
    )
    results = run_sweep(config, args.out, resume=args.resume, workers=_workers(args, workers))
    emit_results(results, args.out, config)
    return 0


def cmd_task(args: argparse.Namespace) -> int:
    config, point = _point_config(
        args,
        tasks=[args.name],
        seeds=args.seeds,
        self_pulsing={"enabled": False} if args.no_pulsing else None,
    )
    result = evaluate_point(point, config)
    _print_yaml(dict(result.to_record()))
    return 0 if not result.failed else 1


def cmd_capacity(args: argparse.Namespace) -> int:
    config, point = _point_config(args)
    params, modulation = point_setup(config, point)
    bias = config.capacity_bias if args.bias is None else args.bias
    report, trace = capacity_run(config, params, modulation, args.seed, bias)
    if args.out is not None:
        report.write_csv(args.out)
        logger.info(f"Wrote capacity curves to {args.out}")
    _print_yaml(
        {
            "orders": {f"c{order}": total for order, total in sorted(report.sums.items())},
            "mc": report.total,
            "noise_floor": report.noise_floor,
            "sigma_delta_nl_hz": trace.sigma,
        }
    )
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    config, point = _point_config(args)
    params, modulation = point_setup(config, point)
    bias = config.capacity_bias if args.bias is None else args.bias
    drive = narma_drive(config, args.seed)
    mask = Mask.generate(modulation.node_count, config.mask_seed + args.seed, UNIPOLAR)
    reservoir = TimeDelayReservoir(params, modulation.with_bias(bias), mask)
    result = reservoir.simulate(drive.train_segment().inputs)
    write_trace_csv(result, args.out)
    logger.info(f"Wrote {len(result)} trace samples to {args.out}")
    return 0


def cmd_pulsing(args: argparse.Namespace) -> int:
    config, point = _point_config(args)
    params, _ = point_setup(config, point)
    pulsing, depth = probe_self_pulsing(config, params, point)
    _print_yaml({"self_pulsing": pulsing, "oscillation_depth": depth})
    return 0


def cmd_config(args: argparse.Namespace) -> int:
    if args.dump_defaults:
        sys.stdout.write(dump_defaults())
        return 0
    config = build_config(load_document(args.check))
    sys.stdout.write(yaml.safe_dump(config.document, sort_keys=False))
    logger.info(f"{args.check} is valid, hash {config.config_hash[:12]}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = load_core_settings()
    errors = validate(settings)
    if errors:
        for error in errors:
            print(error, file=sys.stderr)
        return 2

    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    configure_tracing(settings)
    args = build_parser().parse_args(argv)

    try:
        if args.command == "sweep":
            return cmd_sweep(args, settings.workers)
        if args.command == "cut":
            return cmd_cut(args, settings.workers)
        if args.command == "task":
            return cmd_task(args)
        if args.command == "capacity":
            return cmd_capacity(args)
        if args.command == "trace":
            return cmd_trace(args)
        if args.command == "pulsing":
            return cmd_pulsing(args)
        return cmd_config(args)
    except RingresError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
