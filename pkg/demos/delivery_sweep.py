# Packet delivery of an intermittently powered node over time.
from batteryless_lorawan import TrafficConfig, get_profile, simulate
from batteryless_lorawan.simkit import apply_params, format_trace, sweep

device = get_profile("sx1272-paper")

# %% one run, with its event log
d, traffic = apply_params(device, TrafficConfig(interval_s=20.0, n_packets=5), {"v_sl_fraction": 0.7})
res = simulate(d, traffic, record_timeline=True)
print(format_trace(res.timeline))
print(res.pdr_tx, res.pdr_cycle, res.off_time_s)

# %% threshold x interval grid, 1000 packets each
thresholds = [round(0.55 + 0.05 * i, 2) for i in range(9)]
rows = sweep(device, TrafficConfig(n_packets=1000), {"v_sl_fraction": thresholds, "interval_s": [10, 20, 30, 45]})
print("th    " + "".join(f"{iv:>12}" for iv in (10, 20, 30, 45)))
for th in thresholds:
    cells = [r.result for r in rows if r.params["v_sl_fraction"] == th]
    print(f"{th:.2f}  " + "".join(f"  {c.pdr_tx:4.2f}/{c.pdr_cycle:4.2f}" for c in cells))

# %% full-cycle delivery at SF9 only appears with long intervals
d9, _ = apply_params(device, TrafficConfig(), {"sf": 9})
rows = sweep(d9, TrafficConfig(n_packets=1000),
             {"interval_s": list(range(150, 310, 20)), "v_sl_fraction": [0.8, 0.9, 0.98]})
for iv in range(150, 310, 20):
    print(iv, max(r.result.pdr_cycle for r in rows if r.params["interval_s"] == iv))
