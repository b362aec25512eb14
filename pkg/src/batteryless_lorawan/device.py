"""Battery-less LoRaWAN Class A device: states, loads and the uplink cycle.

A cycle with an empty downlink is five constant-load phases::

    tx     Tx      time on air
    idle1  Idle    RX1 delay
    rx1    Listen  preamble length at the uplink SF
    idle2  Idle    until RX2 opens (RX2 delay after the end of TX)
    rx2    Listen  preamble length at SF12

The device turns off the instant the capacitor falls to ``v_min``; any
phase in progress fails.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import NamedTuple

from .airtime import PhyConfig, preamble_duration, time_on_air
from .circuit import (
    Harvester,
    crossing_time,
    relax,
    steady_state_voltage,
    time_constant,
)
from .errors import ConfigurationError, ParameterError

__all__ = [
    "SystemState",
    "LoadTable",
    "DeviceConfig",
    "CycleOutcome",
    "PHASE_LABELS",
    "PROFILES",
    "get_profile",
    "load_current",
    "cycle_phases",
    "run_cycle",
    "transmit_precheck",
]


class SystemState(enum.Enum):
    OFF = "off"
    SLEEP = "sleep"
    IDLE = "idle"
    TX = "tx"
    LISTEN = "listen"
    RX = "rx"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class LoadTable:
    """Equivalent load resistance (ohms) seen by the capacitor in each state.

    Defaults are for an SX1272 radio with an STM32L162 MCU, TX at +13 dBm.
    """

    off: float = 600_000.0
    sleep: float = 589_286.0
    idle: float = 471_428.0
    tx: float = 117.811
    listen: float = 313.957
    rx: float = 294.354

    def __post_init__(self):
        for state in SystemState:
            value = getattr(self, state.value)
            if not value > 0:
                raise ConfigurationError(f"load for state {state} must be > 0, got {value!r}")

    def __getitem__(self, state: SystemState) -> float:
        try:
            return getattr(self, SystemState(state).value)
        except (ValueError, AttributeError):
            raise ConfigurationError(f"no load defined for state {state!r}") from None


@dataclass(frozen=True)
class DeviceConfig:
    c_farads: float = 4700e-6
    v_min_volts: float = 1.8
    v_sl_volts: float = 0.55 * 3.3
    harvester: Harvester = field(default_factory=Harvester)
    loads: LoadTable = field(default_factory=LoadTable)
    phy: PhyConfig = field(default_factory=PhyConfig)
    rx1_delay_s: float = 1.0
    rx2_delay_s: float = 2.0

    def __post_init__(self):
        if not self.c_farads > 0:
            raise ConfigurationError(f"capacitance must be > 0, got {self.c_farads!r}")
        e = self.harvester.e_volts
        if not 0 < self.v_min_volts < self.v_sl_volts <= e:
            raise ConfigurationError(
                "thresholds must satisfy 0 < v_min < v_sl <= E, got "
                f"v_min={self.v_min_volts!r}, v_sl={self.v_sl_volts!r}, E={e!r}"
            )
        if not 0 < self.rx1_delay_s < self.rx2_delay_s:
            raise ConfigurationError(
                f"need 0 < rx1_delay < rx2_delay, got {self.rx1_delay_s!r}, {self.rx2_delay_s!r}"
            )

    @property
    def e_volts(self) -> float:
        return self.harvester.e_volts

    @property
    def v_sl_fraction(self) -> float:
        return self.v_sl_volts / self.harvester.e_volts

    def with_threshold_fraction(self, fraction: float) -> DeviceConfig:
        """Copy with the turn-on threshold set to ``fraction * E``."""
        return replace(self, v_sl_volts=fraction * self.harvester.e_volts)


PROFILES = {
    # SX1272 reference parameters, implicit header (IH=1).
    "sx1272-paper": DeviceConfig(),
    # Same hardware with the explicit PHY header (IH=0); matches the
    # reference minimum-voltage grid to four significant digits.
    "sx1272-explicit-header": DeviceConfig(phy=PhyConfig(ih=0)),
}

DEFAULT_PROFILE = "sx1272-paper"


def get_profile(name: str) -> DeviceConfig:
    try:
        return PROFILES[name]
    except KeyError:
        known = ", ".join(sorted(PROFILES))
        raise ConfigurationError(f"unknown profile {name!r} (known: {known})") from None


def load_current(state: SystemState, loads: LoadTable, e_volts: float) -> float:
    """Supply current in amperes drawn in ``state`` at the nominal voltage."""
    return e_volts / loads[state]


PHASE_LABELS = ("tx", "idle1", "rx1", "idle2", "rx2")


def cycle_phases(config: DeviceConfig) -> list[tuple[SystemState, float]]:
    """States and durations of one uplink cycle with empty receive windows."""
    phy = config.phy
    rx1_listen = preamble_duration(phy)
    rx2_listen = preamble_duration(_at_sf(phy, 12))
    gap = config.rx2_delay_s - config.rx1_delay_s - rx1_listen
    if gap < 0:
        raise ConfigurationError(
            f"RX1 listen window ({rx1_listen:.6g} s) does not fit before RX2 opens "
            f"({config.rx2_delay_s - config.rx1_delay_s:.6g} s after RX1)"
        )
    return [
        (SystemState.TX, time_on_air(phy)),
        (SystemState.IDLE, config.rx1_delay_s),
        (SystemState.LISTEN, rx1_listen),
        (SystemState.IDLE, gap),
        (SystemState.LISTEN, rx2_listen),
    ]


def _at_sf(phy: PhyConfig, sf: int) -> PhyConfig:
    # only sf, bw and n_preamble matter for the preamble; the payload is
    # pinned to an in-range value so the copy never re-emits a warning
    return PhyConfig(sf=sf, bw_hz=phy.bw_hz, n_preamble=phy.n_preamble, payload_bytes=16)


@dataclass(frozen=True)
class CycleOutcome:
    tx_ok: bool
    cycle_ok: bool
    fail_phase: str | None
    phase_end_voltages: tuple[tuple[str, float], ...]
    elapsed_s: float
    v_end: float


class _Phase(NamedTuple):
    label: str
    state: SystemState
    duration: float
    v_inf: float
    tau: float


class CyclePlan:
    """Per-config constants for repeatedly executing the uplink cycle.

    Holds the steady-state voltage and time constant of every phase so
    that the simulator only evaluates exponentials in its inner loop.
    """

    def __init__(self, config: DeviceConfig):
        self.config = config
        self.v_min = config.v_min_volts
        h = config.harvester
        phases = []
        for label, (state, duration) in zip(PHASE_LABELS, cycle_phases(config)):
            r = config.loads[state]
            phases.append(_Phase(label, state, duration, steady_state_voltage(r, h),
                                 time_constant(r, config.c_farads, h)))
        self.phases = tuple(phases)
        self.duration = sum(p.duration for p in phases)

    def tx_precheck(self, v0: float) -> bool:
        tx = self.phases[0]
        return relax(v0, tx.v_inf, tx.tau, tx.duration) >= self.v_min

    def voltage_at(self, v0: float, t: float) -> float:
        """Voltage ``t`` seconds into a cycle started at ``v0`` (capped at v_min)."""
        v = v0
        for ph in self.phases:
            step = min(t, ph.duration)
            v_next = relax(v, ph.v_inf, ph.tau, step)
            if v_next < self.v_min:
                return self.v_min
            v = v_next
            t -= step
            if t <= 0:
                break
        return v

    def run(self, v0: float) -> CycleOutcome:
        if v0 < self.v_min:
            raise ParameterError(f"cycle must start at or above v_min, got {v0!r} V")
        v = v0
        elapsed = 0.0
        ends = []
        for i, ph in enumerate(self.phases):
            v_next = relax(v, ph.v_inf, ph.tau, ph.duration)
            if v_next < self.v_min:
                t_hit = crossing_time(v, ph.v_inf, ph.tau, self.v_min)
                # asymptote within eps of v_min: report the phase end
                t_hit = min(t_hit, ph.duration)
                ends.append((ph.label, self.v_min))
                return CycleOutcome(
                    tx_ok=i > 0,
                    cycle_ok=False,
                    fail_phase=ph.label,
                    phase_end_voltages=tuple(ends),
                    elapsed_s=elapsed + t_hit,
                    v_end=self.v_min,
                )
            v = v_next
            elapsed += ph.duration
            ends.append((ph.label, v))
        return CycleOutcome(True, True, None, tuple(ends), elapsed, v)


@lru_cache(maxsize=1024)
def cycle_plan(config: DeviceConfig) -> CyclePlan:
    return CyclePlan(config)


def run_cycle(config: DeviceConfig, v0: float) -> CycleOutcome:
    """Execute one TX + RX1 + RX2 cycle starting from capacitor voltage ``v0``."""
    return cycle_plan(config).run(v0)


def transmit_precheck(config: DeviceConfig, v0: float) -> bool:
    """True if the TX phase alone can finish above ``v_min``.

    The receive windows are deliberately not part of the check.
    """
    return cycle_plan(config).tx_precheck(v0)
