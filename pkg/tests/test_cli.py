import argparse
import csv
import io
from dataclasses import fields

import pytest

from batteryless_lorawan.cli import main, parse_grid
from batteryless_lorawan.config import KEYS, build_run_config, parse_config_text, read_config_file
from batteryless_lorawan.device import PROFILES, SystemState
from batteryless_lorawan.errors import ConfigurationError
from batteryless_lorawan.simkit import TrafficConfig


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# --- grids ------------------------------------------------------------------

def test_parse_grid_forms():
    assert parse_grid("16:48:8", int) == [16, 24, 32, 40, 48]
    assert parse_grid("0.001,0.01,0.1") == [0.001, 0.01, 0.1]
    assert parse_grid("45") == [45.0]
    thresholds = parse_grid("0.55:0.98:0.01")
    assert len(thresholds) == 44
    assert thresholds[0] == 0.55 and thresholds[-1] == 0.98 and thresholds[17] == 0.72


@pytest.mark.parametrize("text, cast", [
    ("1:2", float), ("1:0:1", float), ("0:1:0", float), ("a,b", float), ("1.5", int), ("1:2:3:4", float),
])
def test_parse_grid_rejects(text, cast):
    with pytest.raises(argparse.ArgumentTypeError):
        parse_grid(text, cast)


# --- configuration ----------------------------------------------------------

def test_config_text_parsing():
    pairs = parse_config_text("# comment\nphy.sf = 9  # trailing\n\ntraffic.interval_s=250\n")
    assert pairs == {"phy.sf": "9", "traffic.interval_s": "250"}


def test_unknown_key_is_named():
    with pytest.raises(ConfigurationError, match="phy.spreading"):
        parse_config_text("phy.spreading = 9\n")
    with pytest.raises(ConfigurationError, match="expected"):
        parse_config_text("just words\n")


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigurationError):
        read_config_file(tmp_path / "absent.cfg")


def test_profile_reproduces_defaults():
    cfg = build_run_config("sx1272-paper")
    assert cfg.device == PROFILES["sx1272-paper"]
    assert cfg.traffic == TrafficConfig()
    assert cfg.initial_state is SystemState.OFF and cfg.initial_volts is None


def _flatten(cfg):
    d = cfg.device
    flat = {"device.c_farads": d.c_farads, "device.v_min_volts": d.v_min_volts,
            "device.v_sl_volts": d.v_sl_volts, "device.rx1_delay_s": d.rx1_delay_s,
            "device.rx2_delay_s": d.rx2_delay_s,
            "traffic.interval_s": cfg.traffic.interval_s, "traffic.n_packets": cfg.traffic.n_packets,
            "sim.initial_volts": cfg.initial_volts, "sim.initial_state": cfg.initial_state}
    for section, obj in (("phy", d.phy), ("harvester", d.harvester), ("loads", d.loads)):
        for f in fields(obj):
            flat[f"{section}.{f.name}"] = getattr(obj, f.name)
    return flat


@pytest.mark.parametrize("key, value", [
    ("phy.sf", "9"), ("phy.bw_hz", "250000"), ("phy.cr_index", "2"), ("phy.n_preamble", "10"),
    ("phy.ih", "0"), ("phy.de", "1"), ("phy.payload_bytes", "32"),
    ("harvester.e_volts", "3.6"), ("harvester.p_harvester_watts", "0.01"),
    ("device.c_farads", "0.01"), ("device.v_min_volts", "1.7"), ("device.v_sl_volts", "2.5"),
    ("device.rx1_delay_s", "1.5"), ("device.rx2_delay_s", "2.5"),
    ("loads.off", "500000"), ("loads.sleep", "400000"), ("loads.idle", "300000"),
    ("loads.tx", "100"), ("loads.listen", "300"), ("loads.rx", "280"),
    ("traffic.interval_s", "30"), ("traffic.n_packets", "10"),
    ("sim.initial_volts", "3.0"), ("sim.initial_state", "sleep"),
])
def test_single_override_changes_only_that_key(key, value):
    base = _flatten(build_run_config("sx1272-paper"))
    changed = _flatten(build_run_config("sx1272-paper", {key: value}))
    diff = {k for k in base if base[k] != changed[k]}
    assert diff == {key}


def test_every_key_is_covered():
    assert set(KEYS) - {"device.v_sl_fraction"} == set(_flatten(build_run_config()))


def test_threshold_fraction_key():
    cfg = build_run_config(overrides={"device.v_sl_fraction": "0.8", "harvester.e_volts": "3.0"})
    assert cfg.device.v_sl_volts == pytest.approx(2.4)
    with pytest.raises(ConfigurationError):
        build_run_config(overrides={"device.v_sl_fraction": "0.8", "device.v_sl_volts": "2.5"})


def test_bad_value_is_reported():
    with pytest.raises(ConfigurationError, match="phy.sf"):
        build_run_config(overrides={"phy.sf": "seven"})


# --- airtime ----------------------------------------------------------------

def test_airtime_human(capsys):
    code, out, _ = run(capsys, "airtime", "--sf", "7", "--payload", "16")
    assert code == 0
    assert "T_packet   = 0.046336 s" in out
    assert "S_payload  = 33 symbols" in out


def test_airtime_csv(capsys):
    code, out, _ = run(capsys, "airtime", "--sf", "12", "--payload", "1", "--csv")
    (row,) = rows(out)
    assert code == 0 and row["s_payload"] == "8"
    assert float(row["t_sym_s"]) == 0.032768


def test_airtime_bad_sf(capsys):
    code, out, err = run(capsys, "airtime", "--sf", "6", "--payload", "16")
    assert code == 2 and out == ""
    assert err.count("\n") == 1 and "spreading factor" in err


def test_usage_error_is_one_line(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["min-v", "--payload", "16:48"])
    _, err = capsys.readouterr()
    assert exc.value.code == 2
    assert err.count("\n") == 1 and "malformed grid" in err


# --- solvers ----------------------------------------------------------------

def test_min_v_grid(capsys):
    code, out, _ = run(capsys, "min-v", "--eh", "0.001,0.01,0.1", "--sf", "7,9,11", "--payload", "16:48:8")
    table = rows(out)
    assert code == 0 and len(table) == 45
    assert list(table[0]) == ["p_harvester_watts", "sf", "payload_bytes", "c_farads",
                              "value", "feasible", "binding_phase"]
    infeasible = [r for r in table if r["feasible"] == "false"]
    assert infeasible and all(r["value"] == "" for r in infeasible)
    assert all(r["feasible"] in ("true", "false") for r in table)


def test_min_c(capsys):
    code, out, _ = run(capsys, "min-c", "--sf", "11", "--eh", "0.001", "--payload", "16:48:8")
    values = [float(r["value"]) for r in rows(out)]
    assert code == 0 and len(values) == 5
    assert values == sorted(values)
    assert 9000e-6 < values[0] and values[-1] < 23000e-6


def test_wake_time(capsys):
    code, out, _ = run(capsys, "wake-time", "--eh", "0.1", "--threshold", "0.55,0.95", "--start-v", "0")
    t55, t95 = (float(r["value"]) for r in rows(out))
    assert t55 == pytest.approx(0.40875, rel=0.02)
    assert t95 == pytest.approx(1.53481, rel=0.02)


def test_wake_time_unreachable_is_data(capsys):
    code, out, _ = run(capsys, "wake-time", "--eh", "0.001", "--threshold", "0.99")
    (row,) = rows(out)
    assert code == 0 and row["value"] == "" and row["feasible"] == "false"


def test_csv_round_trip(capsys, tmp_path):
    dest = tmp_path / "minv.csv"
    code, out, _ = run(capsys, "min-v", "--sf", "7,9", "--payload", "16,48", "--out", str(dest))
    assert code == 0 and out == ""
    text = dest.read_bytes().decode()
    assert text.endswith("\r\n")
    parsed = rows(text)
    buf = io.StringIO(newline="")
    writer = csv.writer(buf)
    writer.writerow(parsed[0].keys())
    for r in parsed:
        writer.writerow(r.values())
    assert buf.getvalue() == text
    for r in parsed:
        if r["value"]:
            assert repr(float(r["value"])) == r["value"]


# --- simulate ---------------------------------------------------------------

def test_simulate_single_warm_packet(capsys):
    code, out, _ = run(capsys, "simulate", "--packets", "1", "--interval", "10",
                       "--initial-v", "3.3", "--initial-state", "sleep")
    (row,) = rows(out)
    assert code == 0 and row["pdr_cycle"] == "1.0"


def test_simulate_columns_and_order(capsys):
    code, out, _ = run(capsys, "simulate", "--packets", "20", "--threshold", "0.6,0.8", "--interval", "10,45")
    table = rows(out)
    assert list(table[0]) == ["v_sl_fraction", "interval_s", "sf", "payload_bytes", "p_harvester_watts",
                              "c_farads", "attempted", "tx_success", "cycle_success", "pdr_tx",
                              "pdr_cycle", "off_time_s"]
    assert [(r["v_sl_fraction"], r["interval_s"]) for r in table] == [
        ("0.6", "10.0"), ("0.6", "45.0"), ("0.8", "10.0"), ("0.8", "45.0")]


def test_simulate_trace(capsys, tmp_path):
    trace = tmp_path / "trace.tsv"
    code, _, _ = run(capsys, "simulate", "--packets", "5", "--threshold", "0.7", "--interval", "20",
                     "--trace", str(trace))
    assert code == 0
    lines = trace.read_text().splitlines()
    assert lines[0].split("\t")[1] == "lost_off"
    assert all(len(line.split("\t")) == 3 for line in lines)


def test_simulate_trace_rejects_sweep(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--threshold", "0.6,0.7", "--trace", str(tmp_path / "t"))
    assert code == 2 and "single run" in err


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("phy.sf = 9\nphy.payload_bytes = 16\ntraffic.n_packets = 3\ntraffic.interval_s = 99\n")
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--interval", "250")
    (row,) = rows(out)
    assert code == 0
    assert (row["sf"], row["interval_s"], row["attempted"]) == ("9", "250.0", "3")


def test_config_file_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("phy.sf = 9\ndevice.voltage = 3\n")
    code, _, err = run(capsys, "airtime", "--config", str(cfg))
    assert code == 2 and "device.voltage" in err


def test_set_override(capsys):
    code, out, _ = run(capsys, "airtime", "--set", "phy.ih=0", "--csv")
    assert rows(out)[0]["s_payload"] == "38"


def test_explicit_header_profile(capsys):
    code, out, _ = run(capsys, "airtime", "--profile", "sx1272-explicit-header", "--csv")
    assert rows(out)[0]["ih"] == "0"


def test_simulate_is_byte_identical_across_runs(capsys):
    argv = ["simulate", "--packets", "200", "--threshold", "0.55:0.98:0.01", "--interval", "10,20,30,45"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv, "--workers", "2")
    assert first == second and len(rows(first)) == 176
