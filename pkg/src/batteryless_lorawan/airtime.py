"""LoRa physical-layer timing: symbol, preamble, payload and packet durations."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import ParameterError

__all__ = [
    "PayloadRangeWarning",
    "PhyConfig",
    "symbol_duration",
    "preamble_duration",
    "payload_symbol_count",
    "time_on_air",
]

# Payload sizes outside this window are accepted but flagged.
PAYLOAD_MIN_TYPICAL = 13
PAYLOAD_MAX_TYPICAL = 51


class PayloadRangeWarning(UserWarning):
    """Payload length outside the usual LoRaWAN application range."""


@dataclass(frozen=True)
class PhyConfig:
    """LoRa modulation and framing parameters.

    ``cr_index`` is the coding-rate index (1 means 4/5, 4 means 4/8).
    ``ih`` is 1 when the explicit PHY header is left out (implicit header
    mode) and ``de`` is 1 when low data rate optimization is on.
    """

    sf: int = 7
    bw_hz: float = 125_000.0
    cr_index: int = 1
    n_preamble: int = 8
    ih: int = 1
    de: int = 0
    payload_bytes: int = 16

    def __post_init__(self):
        _check_sf(self.sf)
        _check_bw(self.bw_hz)
        if self.cr_index not in (1, 2, 3, 4):
            raise ParameterError(f"cr_index must be 1..4, got {self.cr_index!r}")
        if int(self.n_preamble) != self.n_preamble or self.n_preamble < 0:
            raise ParameterError(f"n_preamble must be a non-negative integer, got {self.n_preamble!r}")
        if self.ih not in (0, 1):
            raise ParameterError(f"ih must be 0 or 1, got {self.ih!r}")
        if self.de not in (0, 1):
            raise ParameterError(f"de must be 0 or 1, got {self.de!r}")
        if int(self.payload_bytes) != self.payload_bytes or self.payload_bytes < 1:
            raise ParameterError(f"payload_bytes must be an integer >= 1, got {self.payload_bytes!r}")
        if not PAYLOAD_MIN_TYPICAL <= self.payload_bytes <= PAYLOAD_MAX_TYPICAL:
            warnings.warn(
                f"payload of {self.payload_bytes} bytes is outside "
                f"[{PAYLOAD_MIN_TYPICAL}, {PAYLOAD_MAX_TYPICAL}]",
                PayloadRangeWarning,
                stacklevel=3,
            )

    @property
    def symbol_duration(self) -> float:
        return symbol_duration(self.sf, self.bw_hz)


def _check_sf(sf) -> None:
    if isinstance(sf, bool) or int(sf) != sf or not 7 <= sf <= 12:
        raise ParameterError(f"spreading factor must be an integer in 7..12, got {sf!r}")


def _check_bw(bw_hz) -> None:
    if not bw_hz > 0 or math.isinf(bw_hz):
        raise ParameterError(f"bandwidth must be positive and finite, got {bw_hz!r}")


def symbol_duration(sf: int, bw_hz: float) -> float:
    """Duration of one chirp symbol in seconds, ``2**sf / bw_hz``."""
    _check_sf(sf)
    _check_bw(bw_hz)
    return (1 << int(sf)) / bw_hz


def preamble_duration(phy: PhyConfig) -> float:
    """Seconds needed to send or receive the preamble (programmed symbols + 4.25)."""
    return (phy.n_preamble + 4.25) * symbol_duration(phy.sf, phy.bw_hz)


def payload_symbol_count(phy: PhyConfig) -> int:
    """Number of symbols carrying PHY header, payload and CRC.

    The numerator can go negative for tiny payloads at high SF; the
    true ceiling is taken first and the product is then clamped at 0,
    so the result never drops below the 8 fixed symbols.
    """
    numerator = 8 * phy.payload_bytes - 4 * phy.sf + 28 + 16 - 20 * phy.ih
    denominator = 4 * (phy.sf - 2 * phy.de)
    # exact integer ceiling, valid for negative numerators too
    blocks = -((-numerator) // denominator)
    return 8 + max(blocks * (phy.cr_index + 4), 0)


def time_on_air(phy: PhyConfig) -> float:
    """Total packet duration in seconds: preamble plus payload symbols."""
    t_sym = symbol_duration(phy.sf, phy.bw_hz)
    return preamble_duration(phy) + payload_symbol_count(phy) * t_sym
