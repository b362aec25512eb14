# How long a LoRa uplink occupies the channel.
from batteryless_lorawan import PhyConfig, payload_symbol_count, preamble_duration, symbol_duration, time_on_air

# %% symbol time doubles with every SF step
for sf in range(7, 13):
    print(f"SF{sf:<2}  T_sym = {symbol_duration(sf, 125e3) * 1e3:7.3f} ms")

# %% one 16-byte packet at SF7
phy = PhyConfig(sf=7, payload_bytes=16)
print(phy)
print("preamble       ", preamble_duration(phy), "s")
print("payload symbols", payload_symbol_count(phy))
print("time on air    ", time_on_air(phy), "s")

# %% payload and header mode
print(f"{'PL':>3} {'SF7 ih=1':>10} {'SF7 ih=0':>10} {'SF11 ih=1':>10}")
for pl in (16, 24, 32, 40, 48):
    row = [time_on_air(PhyConfig(sf=sf, payload_bytes=pl, ih=ih)) * 1e3 for sf, ih in ((7, 1), (7, 0), (11, 1))]
    print(f"{pl:>3} " + " ".join(f"{t:10.3f}" for t in row))

# %% symbols grow in blocks of CR + 4, not byte by byte
print([payload_symbol_count(PhyConfig(sf=12, payload_bytes=pl)) for pl in range(13, 27)])
