__version__ = "0.1.0"

from ringres.cavity import CavityDesign, PhysicalParams, detect_self_pulsing, run_with_feedback
from ringres.errors import (
    ConfigError,
    DataIngestionError,
    IntegrationError,
    PreconditionError,
    ReadoutError,
    RingresError,
    SingularSystemError,
)
from ringres.reservoir import Mask, ModulationConfig, TimeDelayReservoir

__all__ = [
    "__version__",
    "CavityDesign",
    "ConfigError",
    "DataIngestionError",
    "IntegrationError",
    "Mask",
    "ModulationConfig",
    "PhysicalParams",
    "PreconditionError",
    "ReadoutError",
    "RingresError",
    "SingularSystemError",
    "TimeDelayReservoir",
    "detect_self_pulsing",
    "run_with_feedback",
]
