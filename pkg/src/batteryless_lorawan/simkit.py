"""Event-driven simulation of periodic uplinks on an intermittently powered device.

Time jumps from event to event: packet arrivals at ``k * interval_s``
(k = 1..n), turn-on at ``v_sl``, turn-off at ``v_min``, and the phase
boundaries of each uplink cycle. All crossing instants come from the
closed-form circuit solution, so there is no time step and no randomness.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, NamedTuple, Sequence

from .circuit import crossing_time, relax, steady_state_voltage, time_constant
from .device import CyclePlan, DeviceConfig, SystemState
from .errors import ConfigurationError, ParameterError

__all__ = [
    "TrafficConfig",
    "TimelineEvent",
    "SimResult",
    "SweepRow",
    "SWEEP_AXES",
    "simulate",
    "sweep",
    "apply_params",
    "format_trace",
    "parse_trace",
]


@dataclass(frozen=True)
class TrafficConfig:
    interval_s: float = 60.0
    n_packets: int = 1000

    def __post_init__(self):
        if not self.interval_s > 0 or math.isinf(self.interval_s):
            raise ConfigurationError(f"interval_s must be positive and finite, got {self.interval_s!r}")
        if int(self.n_packets) != self.n_packets or self.n_packets < 1:
            raise ConfigurationError(f"n_packets must be an integer >= 1, got {self.n_packets!r}")


class TimelineEvent(NamedTuple):
    time_s: float
    event: str
    voltage: float


@dataclass(frozen=True)
class SimResult:
    attempted: int
    tx_success: int
    cycle_success: int
    pdr_tx: float
    pdr_cycle: float
    off_time_s: float
    timeline: tuple[TimelineEvent, ...] | None = None


def simulate(
    device: DeviceConfig,
    traffic: TrafficConfig,
    initial_v: float | None = None,
    initial_state: SystemState = SystemState.OFF,
    record_timeline: bool = False,
) -> SimResult:
    """Run ``traffic.n_packets`` periodic uplinks and count the outcomes.

    The device starts in ``initial_state`` (Off or Sleep) at ``initial_v``,
    which defaults to ``v_min`` (cold start). A packet is lost if the device
    is off, busy with a previous cycle, or cannot finish the TX phase from
    its present voltage; in the last case it keeps sleeping.
    """
    v_min = device.v_min_volts
    v_sl = device.v_sl_volts
    if initial_v is None:
        initial_v = v_min
    if initial_state not in (SystemState.OFF, SystemState.SLEEP):
        raise ConfigurationError(f"initial state must be off or sleep, got {initial_state}")
    if not 0 <= initial_v <= device.e_volts:
        raise ParameterError(f"initial voltage {initial_v!r} V outside [0, E]")
    if initial_state is SystemState.SLEEP and initial_v < v_min:
        raise ParameterError("a sleeping device cannot be below v_min")

    plan = CyclePlan(device)
    h, c = device.harvester, device.c_farads
    r_off, r_sleep = device.loads[SystemState.OFF], device.loads[SystemState.SLEEP]
    off_inf, off_tau = steady_state_voltage(r_off, h), time_constant(r_off, c, h)
    sleep_inf, sleep_tau = steady_state_voltage(r_sleep, h), time_constant(r_sleep, c, h)

    log = [] if record_timeline else None
    is_off = initial_state is SystemState.OFF
    v = initial_v
    t = 0.0
    off_time = 0.0
    tx_success = cycle_success = 0

    for k in range(1, traffic.n_packets + 1):
        arrival = k * traffic.interval_s

        if t > arrival:
            # still inside the previous cycle
            if log is not None:
                v_now = plan.voltage_at(cycle_v0, arrival - cycle_t0)
                log.append(TimelineEvent(arrival, "lost_busy", v_now))
            continue

        # sleep / off dynamics up to the arrival instant
        while t < arrival:
            if is_off:
                dt = crossing_time(v, off_inf, off_tau, v_sl)
                if t + dt <= arrival:
                    t += dt
                    off_time += dt
                    v = v_sl
                    is_off = False
                    if log is not None:
                        log.append(TimelineEvent(t, "on", v))
                else:
                    off_time += arrival - t
                    v = relax(v, off_inf, off_tau, arrival - t)
                    t = arrival
            else:
                dt = crossing_time(v, sleep_inf, sleep_tau, v_min) if v > v_min else math.inf
                if t + dt <= arrival:
                    t += dt
                    v = v_min
                    is_off = True
                    if log is not None:
                        log.append(TimelineEvent(t, "off", v))
                else:
                    v = relax(v, sleep_inf, sleep_tau, arrival - t)
                    t = arrival

        if is_off:
            if log is not None:
                log.append(TimelineEvent(t, "lost_off", v))
            continue
        if not plan.tx_precheck(v):
            if log is not None:
                log.append(TimelineEvent(t, "lost_energy", v))
            continue

        out = plan.run(v)
        cycle_t0, cycle_v0 = t, v
        if log is not None:
            log.append(TimelineEvent(t, "cycle_start", v))
            elapsed = 0.0
            for ph, (label, v_ph) in zip(plan.phases, out.phase_end_voltages):
                if label == out.fail_phase:
                    log.append(TimelineEvent(t + out.elapsed_s, f"abort_{label}", v_ph))
                    log.append(TimelineEvent(t + out.elapsed_s, "off", v_ph))
                else:
                    elapsed += ph.duration
                    log.append(TimelineEvent(t + elapsed, f"{label}_end", v_ph))
        tx_success += out.tx_ok
        cycle_success += out.cycle_ok
        t += out.elapsed_s
        v = out.v_end
        is_off = not out.cycle_ok

    if log is not None:
        # cycle events are logged ahead of busy-loss arrivals; the sort is
        # stable so same-instant events keep their causal order
        log.sort(key=lambda e: e.time_s)
    n = traffic.n_packets
    return SimResult(
        attempted=n,
        tx_success=tx_success,
        cycle_success=cycle_success,
        pdr_tx=tx_success / n,
        pdr_cycle=cycle_success / n,
        off_time_s=off_time,
        timeline=tuple(log) if log is not None else None,
    )


def format_trace(timeline: Iterable[TimelineEvent]) -> str:
    """One ``time_s<TAB>event<TAB>voltage`` line per event (floats round-trip)."""
    return "".join(f"{e.time_s!r}\t{e.event}\t{e.voltage!r}\n" for e in timeline)


def parse_trace(text: str) -> list[TimelineEvent]:
    events = []
    for line in text.splitlines():
        if line:
            t, name, v = line.split("\t")
            events.append(TimelineEvent(float(t), name, float(v)))
    return events


# --- sweeps ---------------------------------------------------------------

SWEEP_AXES = ("v_sl_fraction", "interval_s", "sf", "payload_bytes", "p_harvester_watts", "c_farads")


class SweepRow(NamedTuple):
    params: dict
    result: SimResult


def apply_params(device: DeviceConfig, traffic: TrafficConfig, params: Mapping[str, float]):
    """Return (device, traffic) with the named sweep parameters substituted."""
    unknown = set(params) - set(SWEEP_AXES)
    if unknown:
        raise ParameterError(f"unknown sweep axis: {sorted(unknown)[0]!r}")
    phy = device.phy
    if "sf" in params or "payload_bytes" in params:
        phy = replace(phy, sf=int(params.get("sf", phy.sf)),
                      payload_bytes=int(params.get("payload_bytes", phy.payload_bytes)))
    harvester = device.harvester
    if "p_harvester_watts" in params:
        harvester = replace(harvester, p_harvester_watts=params["p_harvester_watts"])
    v_sl = device.v_sl_volts
    if "v_sl_fraction" in params:
        v_sl = params["v_sl_fraction"] * harvester.e_volts
    device = replace(device, phy=phy, harvester=harvester, v_sl_volts=v_sl,
                     c_farads=params.get("c_farads", device.c_farads))
    if "interval_s" in params:
        traffic = replace(traffic, interval_s=params["interval_s"])
    return device, traffic


def _run_point(job):
    device, traffic, params, initial_v, initial_state = job
    device, traffic = apply_params(device, traffic, params)
    return simulate(device, traffic, initial_v, initial_state)


def sweep(
    device: DeviceConfig,
    traffic: TrafficConfig,
    axes: Mapping[str, Sequence[float]],
    initial_v: float | None = None,
    initial_state: SystemState = SystemState.OFF,
    workers: int = 1,
) -> list[SweepRow]:
    """Simulate every point of the Cartesian product of ``axes``.

    Rows come out in ``itertools.product`` order over the axes as given
    (first axis outermost), whatever the number of workers.
    """
    if not axes:
        raise ParameterError("sweep needs at least one axis")
    names = list(axes)
    values = [list(axes[name]) for name in names]
    if any(not vals for vals in values):
        raise ParameterError("sweep axes must not be empty")
    points = [dict(zip(names, combo)) for combo in itertools.product(*values)]
    # surface config errors eagerly, before any worker starts
    for p in points:
        apply_params(device, traffic, p)
    jobs = [(device, traffic, p, initial_v, initial_state) for p in points]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_run_point(job) for job in jobs]
    return [SweepRow(p, r) for p, r in zip(points, results)]
