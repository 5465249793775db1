from ringres.cavity.dynamics import (
    StateRates,
    derivatives,
    nonlinear_detuning,
    output_fields,
    step_rk4,
)
from ringres.cavity.feedback import (
    SELF_PULSING_THRESHOLD,
    SimulationResult,
    detect_self_pulsing,
    run_open_loop,
    run_with_feedback,
    simulate,
)
from ringres.cavity.params import (
    CavityDesign,
    PhysicalParams,
    default_integration_step,
    steps_in,
)
from ringres.cavity.state import CavityState, DetuningTrace, PortFields
from ringres.cavity.trace import write_trace_csv

__all__ = [
    "CavityDesign",
    "CavityState",
    "DetuningTrace",
    "PhysicalParams",
    "PortFields",
    "SELF_PULSING_THRESHOLD",
    "SimulationResult",
    "StateRates",
    "default_integration_step",
    "derivatives",
    "detect_self_pulsing",
    "nonlinear_detuning",
    "output_fields",
    "run_open_loop",
    "run_with_feedback",
    "simulate",
    "step_rk4",
    "steps_in",
    "write_trace_csv",
]
