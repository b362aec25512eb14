"""Simulation and feasibility analysis for battery-less LoRaWAN Class A devices."""

from .airtime import (
    PayloadRangeWarning,
    PhyConfig,
    payload_symbol_count,
    preamble_duration,
    symbol_duration,
    time_on_air,
)
from .circuit import (
    UNREACHABLE,
    Harvester,
    IntervalSpec,
    equivalent_resistance,
    internal_resistance,
    steady_state_voltage,
    time_to_reach,
    voltage_after,
)
from .device import (
    PROFILES,
    CycleOutcome,
    DeviceConfig,
    LoadTable,
    SystemState,
    cycle_phases,
    get_profile,
    load_current,
    run_cycle,
    transmit_precheck,
)
from .errors import ConfigurationError, ParameterError
from .simkit import SimResult, TrafficConfig, simulate, sweep
from .solvers import FeasibilityResult, min_capacitance, min_start_voltage, wake_time

__version__ = "0.1.0"
