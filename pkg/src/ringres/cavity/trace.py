import csv
from pathlib import Path

from ringres.cavity.feedback import SimulationResult

TRACE_HEADER = ["t_s", "drop_power_w", "delta_nl_hz"]


def write_trace_csv(result: SimulationResult, path: Path) -> Path:
    """Dump (t, |E_drop|^2, delta_NL), one row per recorded sample."""
    path.parent.mkdir(parents=True, exist_ok=True)
    times = result.detuning.times
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for t, power, delta in zip(times, result.drop_power, result.detuning.samples):
            writer.writerow([f"{t:.6e}", f"{power:.10e}", f"{delta:.10e}"])
    return path
