"""Physical scenario constants for one roadside BS / mobile user link.

Power convention: transmit powers (``p_max``, water level ``rho``, the
baseline's ``p_t``) are an opaque but mutually consistent unit. Only the
dimensionless product ``gamma * power`` enters any rate expression, so the
unit cancels as long as the same one is used throughout. With ``n0`` in
W/Hz the natural choice is watts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SystemParams:
    """Scenario constants shared by every cycle computation."""

    w_tot: float          # bandwidth, Hz
    wavelength: float     # carrier wavelength, m
    n0: float             # noise power spectral density, W/Hz
    delta_s: float        # microslot duration, s
    d: float              # BS-MU distance, m
    xi: float             # antenna efficiency, in (0, 1]
    phi: float            # speed uncertainty v_max - v_min, m/s
    p_max: float          # average power budget
    v_drift: float = 0.0  # drift velocity, m/s (stored; cycle math needs 0)

    def __post_init__(self):
        positive = {
            "w_tot": self.w_tot,
            "wavelength": self.wavelength,
            "n0": self.n0,
            "delta_s": self.delta_s,
            "d": self.d,
            "xi": self.xi,
            "phi": self.phi,
            "p_max": self.p_max,
        }
        for name, value in positive.items():
            if not value > 0.0 or not math.isfinite(value):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.xi > 1.0:
            raise ValueError(f"xi must be in (0, 1], got {self.xi!r}")
        if not math.isfinite(self.v_drift):
            raise ValueError(f"v_drift must be finite, got {self.v_drift!r}")

    def require_zero_drift(self) -> None:
        """Cycle math assumes a residual drift of zero.

        A known non-zero drift is expected to be removed by beam steering
        before these models apply; we reject it rather than model the
        steering.
        """
        if self.v_drift != 0.0:
            raise ValueError(
                f"v_drift = {self.v_drift} m/s: steer the drift out (set it to 0) "
                "before building schedules or evaluating cycle performance"
            )


def snr_gamma(params: SystemParams) -> float:
    """SNR scaling factor per unit transmit power.

    ``gamma * P / omega`` is the receive SNR when power ``P`` is spread
    over a beam of ``omega`` radians: wavelength^2 * xi / (8 pi d^2 N0 W).
    """
    return (params.wavelength**2 * params.xi) / (
        8.0 * math.pi * params.d**2 * params.n0 * params.w_tot
    )
