"""Closed-form transient of the harvester / capacitor / load circuit.

The harvester is an ideal source ``E`` behind a series resistance ``r_i``.
It charges a capacitor ``C`` that feeds a load ``R_L``. Within one interval
the load is constant, so the capacitor voltage relaxes exponentially
toward ``E * R_L / (R_L + r_i)`` with time constant ``R_eq * C``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

__all__ = [
    "UNREACHABLE",
    "Harvester",
    "IntervalSpec",
    "internal_resistance",
    "equivalent_resistance",
    "steady_state_voltage",
    "time_constant",
    "voltage_after",
    "time_to_reach",
]

#: Returned by :func:`time_to_reach` when the target is never hit.
UNREACHABLE = math.inf

# Targets closer than this to the asymptote are treated as never reached.
ASYMPTOTE_EPS = 1e-12


def _positive(name, value) -> None:
    if not value > 0 or math.isinf(value):
        raise ParameterError(f"{name} must be positive and finite, got {value!r}")


def internal_resistance(e_volts: float, p_watts: float) -> float:
    """Series resistance ``E**2 / P`` that caps the harvester at ``p_watts``."""
    _positive("source voltage", e_volts)
    _positive("harvesting power", p_watts)
    return e_volts * e_volts / p_watts


def equivalent_resistance(r_load: float, r_i: float) -> float:
    """Parallel combination of the load and the harvester resistance."""
    _positive("load resistance", r_load)
    _positive("internal resistance", r_i)
    return r_load * r_i / (r_load + r_i)


@dataclass(frozen=True)
class Harvester:
    """Ideal source voltage and the constant power it can deliver."""

    e_volts: float = 3.3
    p_harvester_watts: float = 1e-3

    def __post_init__(self):
        _positive("e_volts", self.e_volts)
        _positive("p_harvester_watts", self.p_harvester_watts)

    @property
    def r_i_ohms(self) -> float:
        return internal_resistance(self.e_volts, self.p_harvester_watts)


def steady_state_voltage(r_load: float, harvester: Harvester) -> float:
    """Voltage the capacitor settles at under a constant load."""
    _positive("load resistance", r_load)
    return harvester.e_volts * r_load / (r_load + harvester.r_i_ohms)


def time_constant(r_load: float, c_farads: float, harvester: Harvester) -> float:
    _positive("capacitance", c_farads)
    return equivalent_resistance(r_load, harvester.r_i_ohms) * c_farads


@dataclass(frozen=True)
class IntervalSpec:
    """One constant-load interval starting at capacitor voltage ``v0_volts``."""

    v0_volts: float
    r_load_ohms: float
    c_farads: float
    harvester: Harvester

    def __post_init__(self):
        _positive("r_load_ohms", self.r_load_ohms)
        _positive("c_farads", self.c_farads)
        if not 0 <= self.v0_volts <= self.harvester.e_volts:
            raise ParameterError(
                f"initial voltage {self.v0_volts!r} V outside [0, {self.harvester.e_volts}] V"
            )

    @property
    def v_inf(self) -> float:
        return steady_state_voltage(self.r_load_ohms, self.harvester)

    @property
    def tau(self) -> float:
        return time_constant(self.r_load_ohms, self.c_farads, self.harvester)


# Scalar kernels shared with the cycle executor and the simulator, which
# precompute (v_inf, tau) once per load state.

def relax(v0: float, v_inf: float, tau: float, t: float) -> float:
    return v_inf + (v0 - v_inf) * math.exp(-t / tau)


def crossing_time(v0: float, v_inf: float, tau: float, v_target: float) -> float:
    if v_target == v0:
        return 0.0
    start = v0 - v_inf
    gap = v_target - v_inf
    if abs(gap) < ASYMPTOTE_EPS:
        return UNREACHABLE
    # target must lie between v0 and the asymptote
    if (start > 0) != (gap > 0) or abs(gap) > abs(start):
        return UNREACHABLE
    return tau * math.log(start / gap)


def voltage_after(spec: IntervalSpec, t: float) -> float:
    """Capacitor voltage ``t`` seconds into the interval."""
    if not t >= 0:
        raise ParameterError(f"elapsed time must be >= 0, got {t!r}")
    if t == 0:
        return spec.v0_volts
    return relax(spec.v0_volts, spec.v_inf, spec.tau, t)


def time_to_reach(spec: IntervalSpec, v_target: float) -> float:
    """Earliest time at which the interval voltage equals ``v_target``.

    Returns :data:`UNREACHABLE` (``math.inf``) when the target lies on the
    far side of the asymptote, behind the start voltage, or within
    ``ASYMPTOTE_EPS`` of the asymptote itself.
    """
    return crossing_time(spec.v0_volts, spec.v_inf, spec.tau, v_target)
