# Can one charged capacitor carry a full uplink plus both receive windows?
from dataclasses import replace

from batteryless_lorawan import Harvester, PhyConfig, cycle_phases, get_profile, run_cycle
from batteryless_lorawan.solvers import min_capacitance, min_start_voltage

device = get_profile("sx1272-paper")

# %% the five phases of a Class A cycle
for state, duration in cycle_phases(device):
    print(f"{state.value:7} {duration * 1e3:9.3f} ms")

# %% walk the cycle from two start voltages
for v0 in (3.0, 2.4):
    out = run_cycle(device, v0)
    print(v0, "->", out.phase_end_voltages, "fail:", out.fail_phase)

# %% lowest start voltage that survives, per harvest rate and SF
explicit = get_profile("sx1272-explicit-header")
for p in (1e-3, 1e-2, 1e-1):
    cells = []
    for sf in (7, 9, 11):
        d = replace(explicit, harvester=Harvester(3.3, p), phy=replace(explicit.phy, sf=sf))
        res = min_start_voltage(d)
        cells.append(f"{res.value:.4f}" if res.feasible else f"  -  ({res.binding_phase})")
    print(f"{p * 1e3:5.0f} mW  " + "  ".join(cells))

# %% capacitor needed when starting fully charged
for sf in (7, 9, 11, 12):
    for pl in (16, 48):
        d = replace(device, phy=PhyConfig(sf=sf, payload_bytes=pl))
        res = min_capacitance(d)
        print(f"SF{sf} PL{pl}: {res.value * 1e6:8.0f} uF" if res.feasible else f"SF{sf} PL{pl}: none up to 1 F")
