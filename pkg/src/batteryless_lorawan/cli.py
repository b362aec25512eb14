"""Command-line front end.

Subcommands::

    airtime     symbol, preamble, payload and packet durations
    min-v       minimum start voltage for a full cycle (CSV)
    min-c       minimum capacitance for a full cycle (CSV)
    wake-time   off-state charging time to a turn-on threshold (CSV)
    simulate    periodic-uplink PDR simulation, optionally swept (CSV)

Grid-valued flags take ``start:stop:step`` (inclusive) or a comma list.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import math
import sys
import warnings
from contextlib import contextmanager

from . import __version__
from .airtime import PayloadRangeWarning, payload_symbol_count, preamble_duration, symbol_duration, time_on_air
from .config import build_run_config, read_config_file
from .device import PROFILES, DEFAULT_PROFILE, SystemState
from .errors import ConfigurationError, ParameterError
from .simkit import apply_params, format_trace, simulate, sweep
from .solvers import min_capacitance, min_start_voltage, wake_time

GRID_HELP = "grid: value, comma list a,b,c or inclusive range start:stop:step"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # one-line diagnostic
        self.exit(2, f"{self.prog}: error: {message}\n")


def parse_grid(text: str, cast=float) -> list:
    """Expand ``start:stop:step`` or ``a,b,c`` into a list of values."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, step = (float(p) for p in parts)
            if not step > 0 or stop < start or not all(map(math.isfinite, (start, stop, step))):
                raise ValueError
            count = math.floor((stop - start) / step + 1e-9) + 1
            raw = [round(start + i * step, 12) for i in range(count)]
        else:
            raw = [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed grid {text!r}") from None
    if cast is int:
        if any(v != int(v) for v in raw):
            raise argparse.ArgumentTypeError(f"grid {text!r} must contain integers")
        return [int(v) for v in raw]
    return raw


def _grid(cast=float):
    def conv(text):
        return parse_grid(text, cast)
    conv.__name__ = "grid"
    return conv


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--config", metavar="FILE", help="flat 'section.key = value' configuration file")
    g.add_argument("--profile", default=DEFAULT_PROFILE, choices=sorted(PROFILES),
                   help=f"built-in parameter set (default: {DEFAULT_PROFILE})")
    g.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one configuration key, e.g. --set loads.tx=120")
    g.add_argument("--csv", action="store_true", help="machine-readable CSV output")
    g.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")


def _phy_flags(p, grid_sf=False, grid_payload=False):
    p.add_argument("--sf", type=_grid(int) if grid_sf else int,
                   help="spreading factor 7..12" + (f" ({GRID_HELP})" if grid_sf else ""))
    p.add_argument("--bw", type=float, help="bandwidth in Hz")
    p.add_argument("--cr", type=int, help="coding-rate index 1..4 (1 = 4/5)")
    p.add_argument("--preamble", type=int, help="programmed preamble symbols")
    p.add_argument("--ih", type=int, choices=(0, 1), help="1 = implicit header (no PHY header)")
    p.add_argument("--de", type=int, choices=(0, 1), help="1 = low data rate optimization")
    p.add_argument("--payload", type=_grid(int) if grid_payload else int,
                   help="payload bytes" + (f" ({GRID_HELP})" if grid_payload else ""))


def _device_flags(p, grid_eh=True, grid_c=False):
    p.add_argument("--e", type=float, help="harvester source voltage E in volts")
    p.add_argument("--eh", type=_grid() if grid_eh else float,
                   help=f"harvesting power in watts ({GRID_HELP})" if grid_eh else "harvesting power in watts")
    p.add_argument("--capacitance", type=_grid() if grid_c else float,
                   help="capacitance in farads" + (f" ({GRID_HELP})" if grid_c else ""))
    p.add_argument("--vmin", type=float, help="turn-off threshold in volts")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="batteryless-lorawan",
        description="Feasibility analysis and simulation of battery-less LoRaWAN Class A devices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("airtime", help="LoRa symbol, preamble and packet durations")
    _phy_flags(p)
    _common(p)

    p = sub.add_parser("min-v", help="minimum start voltage for a TX+RX1+RX2 cycle")
    _phy_flags(p, grid_sf=True, grid_payload=True)
    _device_flags(p, grid_c=True)
    _common(p)

    p = sub.add_parser("min-c", help="minimum capacitance for a TX+RX1+RX2 cycle")
    _phy_flags(p, grid_sf=True, grid_payload=True)
    _device_flags(p)
    p.add_argument("--start-v", type=float, help="cycle start voltage (default: E)")
    _common(p)

    p = sub.add_parser("wake-time", help="time to charge from --start-v to the turn-on threshold")
    _device_flags(p, grid_c=True)
    p.add_argument("--threshold", type=_grid(), required=True,
                   help=f"turn-on threshold as a fraction of E ({GRID_HELP})")
    p.add_argument("--start-v", type=_grid(), default=[0.0],
                   help=f"start voltage in volts, default 0 ({GRID_HELP})")
    _common(p)

    p = sub.add_parser("simulate", help="periodic uplink simulation with PDR metrics")
    _phy_flags(p, grid_sf=True, grid_payload=True)
    _device_flags(p, grid_c=True)
    p.add_argument("--threshold", type=_grid(), help=f"turn-on threshold as a fraction of E ({GRID_HELP})")
    p.add_argument("--interval", type=_grid(), help=f"uplink period in seconds ({GRID_HELP})")
    p.add_argument("--packets", type=int, help="number of uplink attempts")
    p.add_argument("--initial-v", type=float, help="initial capacitor voltage (default: v_min)")
    p.add_argument("--initial-state", choices=("off", "sleep"), help="initial state (default: off)")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes for sweeps")
    p.add_argument("--trace", metavar="FILE", help="write the event timeline of a single run")
    _common(p)
    return parser


# flag dest -> config key, for scalar flags
_SCALAR_KEYS = {
    "bw": "phy.bw_hz",
    "cr": "phy.cr_index",
    "preamble": "phy.n_preamble",
    "ih": "phy.ih",
    "de": "phy.de",
    "e": "harvester.e_volts",
    "vmin": "device.v_min_volts",
    "packets": "traffic.n_packets",
    "initial_v": "sim.initial_volts",
    "initial_state": "sim.initial_state",
}

# flag dest -> (config key, sweep axis name), for flags that may be grids
_GRID_KEYS = {
    "sf": ("phy.sf", "sf"),
    "payload": ("phy.payload_bytes", "payload_bytes"),
    "eh": ("harvester.p_harvester_watts", "p_harvester_watts"),
    "capacitance": ("device.c_farads", "c_farads"),
    "threshold": ("device.v_sl_fraction", "v_sl_fraction"),
    "interval": ("traffic.interval_s", "interval_s"),
}


def _load_config(args):
    """Merge profile, config file, --set and flags into a RunConfig.

    Grid flags are returned separately as ``{axis: [values]}``.
    """
    values = read_config_file(args.config) if args.config else {}
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip()] = value.strip()
    for dest, key in _SCALAR_KEYS.items():
        val = getattr(args, dest, None)
        if val is not None:
            values[key] = val
    grids = {}
    for dest, (key, axis) in _GRID_KEYS.items():
        val = getattr(args, dest, None)
        if val is None:
            continue
        if isinstance(val, list):
            grids[axis] = val
        else:
            values[key] = val
    if "v_sl_fraction" in grids:
        values.pop("device.v_sl_volts", None)
        values.pop("device.v_sl_fraction", None)
    return build_run_config(args.profile, values), grids


def _axis_values(run, grids, axis):
    if axis in grids:
        return grids[axis]
    dev, traffic = run.device, run.traffic
    return [{
        "sf": dev.phy.sf,
        "payload_bytes": dev.phy.payload_bytes,
        "p_harvester_watts": dev.harvester.p_harvester_watts,
        "c_farads": dev.c_farads,
        "v_sl_fraction": dev.v_sl_fraction,
        "interval_s": traffic.interval_s,
    }[axis]]


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, SystemState):
        return value.value
    return value


def _write_csv(out, header, rows):
    writer = csv.writer(out)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _points(run, grids, axes):
    lists = [_axis_values(run, grids, a) for a in axes]
    return [dict(zip(axes, combo)) for combo in itertools.product(*lists)]


def cmd_airtime(args, run, grids, out):
    phy = run.device.phy
    if args.sf is not None or args.payload is not None:
        phy = apply_params(run.device, run.traffic, {
            k: v for k, v in (("sf", args.sf), ("payload_bytes", args.payload)) if v is not None
        })[0].phy
    t_sym = symbol_duration(phy.sf, phy.bw_hz)
    t_pre = preamble_duration(phy)
    n_pay = payload_symbol_count(phy)
    t_pkt = time_on_air(phy)
    if args.csv:
        _write_csv(out,
                   ["sf", "bw_hz", "cr_index", "n_preamble", "ih", "de", "payload_bytes",
                    "t_sym_s", "t_preamble_s", "s_payload", "t_packet_s"],
                   [[phy.sf, phy.bw_hz, phy.cr_index, phy.n_preamble, phy.ih, phy.de,
                     phy.payload_bytes, t_sym, t_pre, n_pay, t_pkt]])
    else:
        out.write(
            f"T_sym      = {t_sym:.9g} s\n"
            f"T_preamble = {t_pre:.9g} s\n"
            f"S_payload  = {n_pay} symbols\n"
            f"T_packet   = {t_pkt:.9g} s\n"
        )


def _solver_rows(run, grids, axes, solve):
    rows = []
    for params in _points(run, grids, axes):
        result = solve(params)
        rows.append([params[a] for a in axes] + [result.value, result.feasible, result.binding_phase])
    return rows


def cmd_min_v(args, run, grids, out):
    axes = ["p_harvester_watts", "sf", "payload_bytes", "c_farads"]

    def solve(params):
        device, _ = apply_params(run.device, run.traffic, params)
        return min_start_voltage(device)

    _write_csv(out, axes + ["value", "feasible", "binding_phase"], _solver_rows(run, grids, axes, solve))


def cmd_min_c(args, run, grids, out):
    axes = ["p_harvester_watts", "sf", "payload_bytes"]

    def solve(params):
        device, _ = apply_params(run.device, run.traffic, params)
        return min_capacitance(device, args.start_v)

    rows = _solver_rows(run, grids, axes, solve)
    start = args.start_v if args.start_v is not None else run.device.e_volts
    header = axes + ["v_start_volts", "value", "feasible", "binding_phase"]
    _write_csv(out, header, [r[:3] + [start] + r[3:] for r in rows])


def cmd_wake_time(args, run, grids, out):
    axes = ["p_harvester_watts", "c_farads"]
    rows = []
    for params in _points(run, grids, axes):
        device, _ = apply_params(run.device, run.traffic, params)
        for v_start in args.start_v:
            for frac in args.threshold:
                t = wake_time(device, v_start, frac)
                ok = math.isfinite(t)
                rows.append([params[a] for a in axes] + [v_start, frac, t if ok else None, ok, None])
    header = axes + ["v_start_volts", "threshold_fraction", "value", "feasible", "binding_phase"]
    _write_csv(out, header, rows)


SIM_AXES = ["v_sl_fraction", "interval_s", "sf", "payload_bytes", "p_harvester_watts", "c_farads"]
SIM_COLUMNS = ["attempted", "tx_success", "cycle_success", "pdr_tx", "pdr_cycle", "off_time_s"]


def cmd_simulate(args, run, grids, out):
    axes = {a: _axis_values(run, grids, a) for a in SIM_AXES}
    n_points = math.prod(len(v) for v in axes.values())
    if args.trace and n_points > 1:
        raise UsageError("--trace needs a single run, not a sweep")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if args.trace:
        device, traffic = apply_params(run.device, run.traffic, {a: v[0] for a, v in axes.items()})
        res = simulate(device, traffic, run.initial_volts, run.initial_state, record_timeline=True)
        with open(args.trace, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_trace(res.timeline))
        rows = [({a: v[0] for a, v in axes.items()}, res)]
    else:
        rows = sweep(run.device, run.traffic, axes, run.initial_volts, run.initial_state,
                     workers=args.workers)
    _write_csv(out, SIM_AXES + SIM_COLUMNS, [
        [params[a] for a in SIM_AXES] + [getattr(res, c) for c in SIM_COLUMNS]
        for params, res in rows
    ])


COMMANDS = {
    "airtime": cmd_airtime,
    "min-v": cmd_min_v,
    "min-c": cmd_min_c,
    "wake-time": cmd_wake_time,
    "simulate": cmd_simulate,
}


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        buf = io.StringIO(newline="")
        yield buf
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    prog = f"{parser.prog} {args.command}"
    try:
        with warnings.catch_warnings():
            # payloads outside 13..51 bytes are legitimate inputs here
            warnings.simplefilter("ignore", PayloadRangeWarning)
            run, grids = _load_config(args)
            with _output(args.out) as out:
                COMMANDS[args.command](args, run, grids, out)
    except (UsageError, ParameterError, ConfigurationError) as exc:
        print(f"{prog}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
