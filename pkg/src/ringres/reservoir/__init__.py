from ringres.reservoir.detection import (
    StateMatrix,
    assemble_states,
    detection_window_steps,
    photodetect,
    with_bias_column,
)
from ringres.reservoir.mask import BIPOLAR, UNIPOLAR, Mask
from ringres.reservoir.modulation import (
    ModulationConfig,
    build_masked_input,
    modulate,
    node_envelope,
    power_scale,
)
from ringres.reservoir.runner import ReservoirRun, TimeDelayReservoir

__all__ = [
    "BIPOLAR",
    "Mask",
    "ModulationConfig",
    "ReservoirRun",
    "StateMatrix",
    "TimeDelayReservoir",
    "UNIPOLAR",
    "assemble_states",
    "build_masked_input",
    "detection_window_steps",
    "modulate",
    "node_envelope",
    "photodetect",
    "power_scale",
    "with_bias_column",
]
