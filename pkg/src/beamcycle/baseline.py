"""Fixed-beamwidth comparison scheme in the style of IEEE 802.11ad.

The comparison point keeps a constant (default 7 degree) beam and realigns
with a two-beam scan whenever worst-case motion at ``v_max`` could have
carried the user to the beam edge. Only the beam half-length on the road,
``r = d * tan(beamwidth/2)``, the realignment overhead ``2 * delta_s``,
and the constant transmit power enter the resulting rate/power formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import SystemParams, snr_gamma


@dataclass(frozen=True)
class BaselineConfig:
    beamwidth_deg: float = 7.0  # fixed scan/communication beamwidth, degrees
    v_max: float = 20.0         # worst-case speed magnitude, m/s
    p_t: float = 1.0            # constant transmit power while communicating

    def __post_init__(self):
        if self.beamwidth_deg <= 0.0:
            raise ValueError(f"beamwidth_deg must be positive, got {self.beamwidth_deg!r}")
        if self.v_max <= 0.0:
            raise ValueError(f"v_max must be positive, got {self.v_max!r}")
        if self.p_t < 0.0:
            raise ValueError(f"p_t must be nonnegative, got {self.p_t!r}")


def comm_fraction(params: SystemParams, cfg: BaselineConfig) -> float:
    """Fraction of time spent communicating between two-beam realignments."""
    r = params.d * math.tan(math.radians(cfg.beamwidth_deg) / 2.0)
    dwell = r / cfg.v_max
    return dwell / (dwell + 2.0 * params.delta_s)


def rate_and_power(params: SystemParams, cfg: BaselineConfig) -> tuple[float, float]:
    """Average rate (bit/s) and average power of the fixed-beam scheme."""
    f_comm = comm_fraction(params, cfg)
    omega = math.radians(cfg.beamwidth_deg)
    rate = params.w_tot * math.log2(1.0 + snr_gamma(params) * cfg.p_t / omega) * f_comm
    return rate, cfg.p_t * f_comm


def power_for_avg(params: SystemParams, cfg: BaselineConfig, p_bar_target: float) -> float:
    """Transmit power that makes the scheme's average power hit the target."""
    if p_bar_target <= 0.0:
        raise ValueError(f"p_bar_target must be positive, got {p_bar_target!r}")
    return p_bar_target / comm_fraction(params, cfg)
