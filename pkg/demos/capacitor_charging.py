# The storage capacitor as an RC circuit fed by the harvester.
from dataclasses import replace

from batteryless_lorawan import Harvester, IntervalSpec, get_profile, steady_state_voltage, time_to_reach, voltage_after
from batteryless_lorawan.solvers import wake_time

h = Harvester(e_volts=3.3, p_harvester_watts=1e-3)
print("internal resistance r_i =", h.r_i_ohms, "ohm")

# %% every load pulls the capacitor toward its own asymptote
loads = get_profile("sx1272-paper").loads
for state in ("off", "sleep", "idle", "tx", "listen"):
    r = getattr(loads, state)
    print(f"{state:7} R_L = {r:10.3f} ohm  V_inf = {steady_state_voltage(r, h):.4f} V")

# %% a transmission drains, an off period recharges
tx = IntervalSpec(v0_volts=3.0, r_load_ohms=loads.tx, c_farads=4700e-6, harvester=h)
print("after 46 ms of TX:", voltage_after(tx, 46.336e-3))
print("time to drop to 1.8 V:", time_to_reach(tx, 1.8), "s")

off = IntervalSpec(1.8, loads.off, 4700e-6, h)
print("charging back to 2.5 V:", time_to_reach(off, 2.5), "s")
print("3.3 V is never reached:", time_to_reach(off, 3.3))

# %% wake-up time from an empty capacitor against the turn-on threshold
for p in (1e-3, 1e-2, 1e-1):
    device = replace(get_profile("sx1272-paper"), harvester=Harvester(3.3, p))
    times = [wake_time(device, 0.0, f) for f in (0.55, 0.75, 0.95)]
    print(f"{p * 1e3:5.0f} mW  " + "  ".join(f"{t:9.3f} s" for t in times))
