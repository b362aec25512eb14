"""Feasibility searches over the uplink cycle.

Whether a cycle completes is monotone in the start voltage and in the
capacitance, so both minima are found by bisection on a pass/fail
predicate. The turn-on delay has a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .circuit import IntervalSpec, time_to_reach
from .device import CyclePlan, DeviceConfig, SystemState, cycle_plan
from .errors import ParameterError

__all__ = [
    "FeasibilityResult",
    "min_start_voltage",
    "min_capacitance",
    "wake_time",
]

C_SEARCH_MIN = 1e-6
C_SEARCH_MAX = 1.0


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of a minimum search.

    ``value`` is None exactly when ``feasible`` is False. ``binding_phase``
    names the cycle phase in which the voltage hits ``v_min`` just below
    the minimum (or at the search bound, for infeasible cases).
    """

    value: float | None
    feasible: bool
    binding_phase: str | None = None

    def __post_init__(self):
        if self.feasible == (self.value is None):
            raise ValueError("value must be present iff the result is feasible")


def _bisect(passes, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Shrink [lo, hi] with passes(lo) False and passes(hi) True to width tol."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def min_start_voltage(config: DeviceConfig, tol: float = 1e-5) -> FeasibilityResult:
    """Lowest capacitor voltage from which a full TX + RX1 + RX2 cycle completes."""
    plan = cycle_plan(config)
    e = config.e_volts
    top = plan.run(e)
    if not top.cycle_ok:
        return FeasibilityResult(None, False, top.fail_phase)
    bottom = plan.run(config.v_min_volts)
    if bottom.cycle_ok:
        return FeasibilityResult(config.v_min_volts, True, None)
    lo, hi = _bisect(lambda v: plan.run(v).cycle_ok, config.v_min_volts, e, tol)
    return FeasibilityResult(hi, True, plan.run(lo).fail_phase)


def min_capacitance(
    config: DeviceConfig,
    v_start: float | None = None,
    rtol: float = 1e-4,
) -> FeasibilityResult:
    """Smallest capacitance that completes a cycle started at ``v_start``.

    ``v_start`` defaults to the source voltage E (capacitor fully charged).
    The search is over log(C) in [1 uF, 1 F]; the capacitance stored in
    ``config`` is ignored.
    """
    if v_start is None:
        v_start = config.e_volts
    if not config.v_min_volts <= v_start <= config.e_volts:
        raise ParameterError(f"v_start {v_start!r} V outside [v_min, E]")

    def outcome(log_c):
        return CyclePlan(replace(config, c_farads=math.exp(log_c))).run(v_start)

    lo, hi = math.log(C_SEARCH_MIN), math.log(C_SEARCH_MAX)
    top = outcome(hi)
    if not top.cycle_ok:
        return FeasibilityResult(None, False, top.fail_phase)
    if outcome(lo).cycle_ok:
        return FeasibilityResult(C_SEARCH_MIN, True, None)
    # a width of rtol in log space is a relative tolerance of ~rtol in C
    lo, hi = _bisect(lambda x: outcome(x).cycle_ok, lo, hi, math.log1p(rtol))
    return FeasibilityResult(math.exp(hi), True, outcome(lo).fail_phase)


def wake_time(config: DeviceConfig, v_start: float, threshold_fraction: float) -> float:
    """Seconds spent off while charging from ``v_start`` to ``threshold_fraction * E``.

    Returns ``math.inf`` when the off-state steady-state voltage stays
    below the threshold.
    """
    if not 0 <= threshold_fraction <= 1:
        raise ParameterError(f"threshold_fraction must be in [0, 1], got {threshold_fraction!r}")
    target = threshold_fraction * config.e_volts
    if v_start > target:
        raise ParameterError(f"start voltage {v_start!r} V is already above the threshold {target!r} V")
    spec = IntervalSpec(v_start, config.loads[SystemState.OFF], config.c_farads, config.harvester)
    return time_to_reach(spec, target)
