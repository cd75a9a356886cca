"""Averaged-model simulator of a scalable solar DC microgrid.

PV array -> perturb-and-observe tracker -> boost average converter ->
DC bus -> N parallel full-bridge units charging lead-acid batteries.
"""

from .config import (Scenario, SourceConverterConfig, PmuUnit,
                     dump_scenario, parse_scenario, with_overrides)
from .converters import (BoostState, PmuConfig, PmuState,
                         boost_input_voltage, boost_output_current,
                         fb_gain_ideal, fb_gain_lossy, pmu_solve_current)
from .errors import (ConfigError, MicrogridError, SimulationError,
                     SolverError)
from .grid import (BusState, IrradianceProfile, SimResult, SteadySummary,
                   simulate, steady_state_summary)
from .mppt import MpptConfig, MpptState, mppt_step
from .pv import (PvOperatingPoint, PvParams, pv_current, pv_mpp,
                 pv_open_circuit_voltage)
from .storage import (BatteryConfig, BatteryState, battery_initial_state,
                      battery_ocv, battery_step)

__version__ = "0.1.0"

__all__ = [
    "BatteryConfig", "BatteryState", "BoostState", "BusState",
    "ConfigError", "IrradianceProfile", "MicrogridError", "MpptConfig",
    "MpptState", "PmuConfig", "PmuState", "PmuUnit", "PvOperatingPoint",
    "PvParams", "Scenario", "SimResult", "SimulationError", "SolverError",
    "SourceConverterConfig", "SteadySummary", "battery_initial_state",
    "battery_ocv", "battery_step", "boost_input_voltage",
    "boost_output_current", "dump_scenario", "fb_gain_ideal",
    "fb_gain_lossy", "mppt_step", "parse_scenario", "pmu_solve_current",
    "pv_current", "pv_mpp", "pv_open_circuit_voltage", "simulate",
    "steady_state_summary", "with_overrides",
]
