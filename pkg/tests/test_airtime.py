import itertools
import warnings

import pytest
from hypothesis import given, strategies as st

from batteryless_lorawan.airtime import (
    PayloadRangeWarning,
    PhyConfig,
    payload_symbol_count,
    preamble_duration,
    symbol_duration,
    time_on_air,
)
from batteryless_lorawan.errors import ParameterError

from oracles import brute_airtime


def phy(**kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PayloadRangeWarning)
        return PhyConfig(**kw)


@pytest.mark.parametrize("sf, bw, expected", [
    (7, 125_000, 1.024e-3),
    (12, 125_000, 32.768e-3),
    (7, 250_000, 0.512e-3),
])
def test_symbol_duration(sf, bw, expected):
    assert symbol_duration(sf, bw) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("sf, bw", [(6, 125e3), (13, 125e3), (7, 0), (7, -1.0), (7.5, 125e3)])
def test_symbol_duration_rejects_bad_parameters(sf, bw):
    with pytest.raises(ParameterError):
        symbol_duration(sf, bw)


@pytest.mark.parametrize("kw, expected", [
    (dict(sf=7), 12.544e-3),
    (dict(sf=12), 401.408e-3),
    (dict(sf=7, n_preamble=0), 4.352e-3),
])
def test_preamble_duration(kw, expected):
    assert preamble_duration(PhyConfig(**kw)) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("kw, expected", [
    (dict(sf=7, payload_bytes=16), 33),
    (dict(sf=12, payload_bytes=1), 8),
    (dict(sf=11, payload_bytes=16), 23),
])
def test_payload_symbol_count(kw, expected):
    assert payload_symbol_count(phy(ih=1, de=0, cr_index=1, **kw)) == expected


def test_negative_numerator_uses_true_ceiling():
    # numerator 8 - 48 + 44 - 20 = -16; ceil(-16/48) is 0, not -1
    assert payload_symbol_count(phy(sf=12, payload_bytes=1)) == 8
    # explicit header at SF12, PL=1: ceil(4/48) = 1
    assert payload_symbol_count(phy(sf=12, payload_bytes=1, ih=0)) == 13


@pytest.mark.parametrize("sf, expected", [(7, 46.336e-3), (11, 577.536e-3)])
def test_time_on_air(sf, expected):
    assert time_on_air(PhyConfig(sf=sf, payload_bytes=16)) == pytest.approx(expected, rel=1e-12)


def test_payload_range_warning():
    with pytest.warns(PayloadRangeWarning):
        PhyConfig(payload_bytes=64)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        PhyConfig(payload_bytes=13)
        PhyConfig(payload_bytes=51)


@pytest.mark.parametrize("kw", [
    dict(cr_index=0), dict(cr_index=5), dict(ih=2), dict(de=-1),
    dict(payload_bytes=0), dict(n_preamble=-1), dict(sf=6), dict(bw_hz=0.0),
])
def test_phy_config_validation(kw):
    with pytest.raises(ParameterError):
        PhyConfig(**kw)


def test_matches_exact_oracle_over_full_grid():
    for sf, pl, cr, ih, de in itertools.product(range(7, 13), range(1, 65), range(1, 5), (0, 1), (0, 1)):
        p = phy(sf=sf, payload_bytes=pl, cr_index=cr, ih=ih, de=de)
        t_sym, t_pre, n_sym, t_pkt = brute_airtime(sf, 125_000, cr, 8, ih, de, pl)
        assert symbol_duration(sf, 125_000) == pytest.approx(t_sym, rel=1e-12)
        assert preamble_duration(p) == pytest.approx(t_pre, rel=1e-12)
        assert payload_symbol_count(p) == n_sym
        assert time_on_air(p) == pytest.approx(t_pkt, rel=1e-12)


phys = st.builds(
    phy,
    sf=st.integers(7, 12),
    bw_hz=st.sampled_from([62_500.0, 125_000.0, 250_000.0, 500_000.0]),
    cr_index=st.integers(1, 4),
    n_preamble=st.integers(0, 16),
    ih=st.integers(0, 1),
    de=st.integers(0, 1),
    payload_bytes=st.integers(1, 250),
)


@given(phys)
def test_composition_identity(p):
    expected = preamble_duration(p) + payload_symbol_count(p) * symbol_duration(p.sf, p.bw_hz)
    assert time_on_air(p) == expected
    assert payload_symbol_count(p) >= 8
    assert time_on_air(p) > 0


@given(phys)
def test_monotone_in_payload_and_coding_rate(p):
    bigger = phy(**{**p.__dict__, "payload_bytes": p.payload_bytes + 1})
    assert time_on_air(bigger) >= time_on_air(p)
    if p.cr_index < 4:
        assert time_on_air(phy(**{**p.__dict__, "cr_index": p.cr_index + 1})) >= time_on_air(p)


@given(phys)
def test_doubling_bandwidth_halves_durations(p):
    fast = phy(**{**p.__dict__, "bw_hz": 2 * p.bw_hz})
    assert symbol_duration(fast.sf, fast.bw_hz) == symbol_duration(p.sf, p.bw_hz) / 2
    assert preamble_duration(fast) == pytest.approx(preamble_duration(p) / 2, rel=1e-15)
    assert time_on_air(fast) == pytest.approx(time_on_air(p) / 2, rel=1e-15)
