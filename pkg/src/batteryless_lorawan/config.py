"""Flat ``section.key = value`` run configuration.

Example file::

    # indoor light, SF9
    phy.sf = 9
    harvester.p_harvester_watts = 0.001
    device.v_sl_fraction = 0.8
    traffic.interval_s = 250

All quantities are SI base units. Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .device import DEFAULT_PROFILE, DeviceConfig, SystemState, get_profile
from .errors import ConfigurationError
from .simkit import TrafficConfig

__all__ = ["RunConfig", "KEYS", "read_config_file", "parse_config_text", "build_run_config"]


def _flag(text: str) -> int:
    value = int(text)
    if value not in (0, 1):
        raise ValueError("expected 0 or 1")
    return value


def _state(text: str) -> SystemState:
    return SystemState(text.strip().lower())


KEYS = {
    "phy.sf": int,
    "phy.bw_hz": float,
    "phy.cr_index": int,
    "phy.n_preamble": int,
    "phy.ih": _flag,
    "phy.de": _flag,
    "phy.payload_bytes": int,
    "harvester.e_volts": float,
    "harvester.p_harvester_watts": float,
    "device.c_farads": float,
    "device.v_min_volts": float,
    "device.v_sl_volts": float,
    "device.v_sl_fraction": float,
    "device.rx1_delay_s": float,
    "device.rx2_delay_s": float,
    "loads.off": float,
    "loads.sleep": float,
    "loads.idle": float,
    "loads.tx": float,
    "loads.listen": float,
    "loads.rx": float,
    "traffic.interval_s": float,
    "traffic.n_packets": int,
    "sim.initial_volts": float,
    "sim.initial_state": _state,
}


@dataclass(frozen=True)
class RunConfig:
    device: DeviceConfig = field(default_factory=lambda: get_profile(DEFAULT_PROFILE))
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    initial_volts: float | None = None
    initial_state: SystemState = SystemState.OFF


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigurationError(f"{source}:{lineno}: expected 'section.key = value'")
        if key not in KEYS:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        pairs[key] = value.strip()
    return pairs


def read_config_file(path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {str(path)!r}: {exc.strerror}") from None
    return parse_config_text(text, str(path))


def _convert(key: str, value):
    if key not in KEYS:
        raise ConfigurationError(f"unknown key {key!r}")
    if not isinstance(value, str):
        return value
    try:
        return KEYS[key](value)
    except ValueError:
        raise ConfigurationError(f"bad value for {key}: {value!r}") from None


def build_run_config(profile: str = DEFAULT_PROFILE, overrides: Mapping[str, object] = ()) -> RunConfig:
    """Start from a named profile and apply ``section.key`` overrides.

    Later layers are applied by the caller merging dicts (file first,
    then command-line flags); here every key is applied at once so that
    intermediate combinations are never validated.
    """
    values = {key: _convert(key, val) for key, val in dict(overrides).items()}
    if "device.v_sl_volts" in values and "device.v_sl_fraction" in values:
        raise ConfigurationError("give either device.v_sl_volts or device.v_sl_fraction, not both")
    base = get_profile(profile)

    def section(name):
        prefix = name + "."
        return {k[len(prefix):]: v for k, v in values.items() if k.startswith(prefix)}

    phy = replace(base.phy, **section("phy")) if section("phy") else base.phy
    harvester = replace(base.harvester, **section("harvester")) if section("harvester") else base.harvester
    loads = replace(base.loads, **section("loads")) if section("loads") else base.loads
    dev = section("device")
    if "v_sl_fraction" in dev:
        dev["v_sl_volts"] = dev.pop("v_sl_fraction") * harvester.e_volts
    device = replace(base, phy=phy, harvester=harvester, loads=loads, **dev)
    traffic = replace(TrafficConfig(), **section("traffic"))
    sim = section("sim")
    return RunConfig(
        device=device,
        traffic=traffic,
        initial_volts=sim.get("initial_volts"),
        initial_state=sim.get("initial_state", SystemState.OFF),
    )
