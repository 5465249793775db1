from ringres.sweep.grid import GridPoint, SweepGrid, axis_points, dbm_to_watts, ghz_to_rad_per_s
from ringres.sweep.results import (
    REGION_A_SIGMA_HZ,
    CapacitySummary,
    SweepResult,
    TaskSummary,
    classify_region,
    sigma_delta_nl,
)

__all__ = [
    "REGION_A_SIGMA_HZ",
    "CapacitySummary",
    "GridPoint",
    "SweepGrid",
    "SweepResult",
    "TaskSummary",
    "axis_points",
    "classify_region",
    "dbm_to_watts",
    "ghz_to_rad_per_s",
    "sigma_delta_nl",
]
