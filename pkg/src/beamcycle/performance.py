"""Closed-form cycle performance and its dimensionless normalization.

During data communication the beam tracks the growing uncertainty width
u_t, so the SNR decays as gamma*P_t/(u_t/d). The rate-optimal power
allocation at fixed average power is water-filling over time with level
``rho``, and the cycle-averaged rate and power then have closed forms.

The normalization
    upsilon = u_th / (delta_s * phi)        (trigger width in drift units)
    zeta    = d*gamma*rho / (delta_s*phi*upsilon) - 1   (water-level headroom)
removes every system constant from the design problem: the normalized rate
``norm_rate`` and power ``norm_power`` depend on (n_beams, upsilon, zeta)
only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import FeasibilityError
from .params import SystemParams, snr_gamma
from .sweep import comm_width, cycle_duration, min_u_th, trigger_width_branches

LN2 = math.log(2.0)

# Relative slack for boundary feasibility checks; the formulas themselves
# are short closed forms, so anything beyond rounding noise is a real
# violation.
_EPS = 1e-9


def instantaneous_rate(params: SystemParams, p_t: float, omega_t: float) -> float:
    """Shannon rate (bit/s) of a beam of width ``omega_t`` rad at power ``p_t``."""
    if omega_t <= 0.0:
        raise ValueError(f"beamwidth must be positive, got {omega_t!r}")
    if p_t < 0.0:
        raise ValueError(f"power must be nonnegative, got {p_t!r}")
    return params.w_tot * math.log2(1.0 + snr_gamma(params) * p_t / omega_t)


def waterfilling_power(rho: float, u_t: float, d: float, gamma: float) -> float:
    """Water-filling power at uncertainty width ``u_t``: (rho - u_t/(d*gamma))+."""
    if min(rho, u_t, d, gamma) < 0.0:
        raise ValueError("waterfilling_power arguments must be nonnegative")
    return max(0.0, rho - u_t / (d * gamma))


@dataclass(frozen=True)
class PowerProfile:
    """Water-filling profile over the data phase [t_start, t_end]."""

    rho: float      # water level, power units
    t_start: float  # n_beams * delta_s, s
    t_end: float    # cycle duration T, s


def waterfilling_profile(
    params: SystemParams, n_beams: int, u_th: float, rho: float
) -> PowerProfile:
    u_c = comm_width(params, u_th, n_beams)
    gamma = snr_gamma(params)
    floor = u_c / (params.d * gamma)
    if rho < floor * (1.0 - _EPS):
        raise ValueError(
            f"water level rho = {rho} below the channel floor u_comm/(d*gamma) = {floor}"
        )
    return PowerProfile(
        rho=rho,
        t_start=n_beams * params.delta_s,
        t_end=cycle_duration(params, u_th, n_beams),
    )


def _check_cycle_inputs(
    params: SystemParams, n_beams: int, u_th: float, rho: float
) -> tuple[float, float, float]:
    """Validate a (n_beams, u_th, rho) design; return (gamma, u_comm, T)."""
    params.require_zero_drift()
    if u_th < min_u_th(params, n_beams) * (1.0 - _EPS):
        raise FeasibilityError(
            f"u_th = {u_th} m infeasible for {n_beams} beams "
            f"(minimum {min_u_th(params, n_beams)} m)"
        )
    gamma = snr_gamma(params)
    u_c = comm_width(params, u_th, n_beams)
    if rho * params.d * gamma < u_c * (1.0 - _EPS):
        raise ValueError(
            f"rho = {rho} below the water-filling floor u_comm/(d*gamma) "
            f"= {u_c / (params.d * gamma)}"
        )
    return gamma, u_c, cycle_duration(params, u_th, n_beams)


def avg_rate_closed(
    params: SystemParams, n_beams: int, u_th: float, rho: float
) -> float:
    """Cycle-averaged rate (bit/s) under water-filling at level ``rho``."""
    gamma, u_c, t_cycle = _check_cycle_inputs(params, n_beams, u_th, rho)
    level = params.d * gamma * rho  # water level expressed as a width, m
    bracket = (
        (u_th - u_c) * (1.0 + math.log(level))
        - u_th * math.log(u_th)
        + u_c * math.log(u_c)
    )
    if level <= u_th:
        # Water level inside the cycle: the tail of the data phase is idle.
        bracket += u_th * math.log(u_th / level) + level - u_th
    return params.w_tot / (LN2 * params.phi * t_cycle) * bracket


def avg_power_closed(
    params: SystemParams, n_beams: int, u_th: float, rho: float
) -> float:
    """Cycle-averaged transmit power under water-filling at level ``rho``."""
    gamma, u_c, t_cycle = _check_cycle_inputs(params, n_beams, u_th, rho)
    level = params.d * gamma * rho
    denom = 2.0 * params.d * params.phi * gamma * t_cycle
    value = (u_th - u_c) * (2.0 * level - u_th - u_c) / denom
    if level <= u_th:
        value += (u_th - level) ** 2 / denom
    return value


# ---------------------------------------------------------------------------
# Dimensionless forms
# ---------------------------------------------------------------------------


def norm_comm_width(upsilon: float, n_beams: int) -> float:
    """Post-sweep width in drift units: upsilon/n + n/2 + 3/2 - 1/n."""
    if n_beams < 2:
        raise ValueError(f"need at least 2 sweeping beams, got {n_beams!r}")
    n = float(n_beams)
    return upsilon / n + n / 2.0 + 1.5 - 1.0 / n


def _check_normalized(n_beams: int, upsilon: float, zeta: float) -> float:
    """Validate the analytic domain of the normalized forms.

    Geometric feasibility (upsilon at or above its per-beam-count minimum)
    is deliberately not required here: the per-beam-count optimizer
    evaluates these expressions below that bound before clamping.
    """
    if upsilon <= 0.0:
        raise ValueError(f"upsilon must be positive, got {upsilon!r}")
    u_hat = norm_comm_width(upsilon, n_beams)
    if zeta < (u_hat / upsilon - 1.0) - _EPS:
        raise ValueError(
            f"zeta = {zeta} below the zero-power boundary {u_hat / upsilon - 1.0}"
        )
    return u_hat


def norm_rate(n_beams: int, upsilon: float, zeta: float) -> float:
    """Normalized average rate: ln(2)/w_tot times the physical one."""
    u_hat = _check_normalized(n_beams, upsilon, zeta)
    n = float(n_beams)
    pref = n / ((n - 1.0) * (upsilon + n / 2.0 - 1.0))
    value = (upsilon - u_hat) * (1.0 + math.log1p(zeta)) - u_hat * math.log(
        upsilon / u_hat
    )
    if zeta < 0.0:
        # Idle tail of the data phase: water level below u_th.
        value += upsilon * (zeta - math.log1p(zeta))
    return pref * value


def norm_power(n_beams: int, upsilon: float, zeta: float) -> float:
    """Normalized average power: d*gamma/(delta_s*phi) times the physical one."""
    u_hat = _check_normalized(n_beams, upsilon, zeta)
    n = float(n_beams)
    pref = n / (2.0 * (n - 1.0) * (upsilon + n / 2.0 - 1.0))
    value = (upsilon - u_hat) * (2.0 * upsilon * (1.0 + zeta) - upsilon - u_hat)
    if zeta < 0.0:
        value += upsilon**2 * zeta**2
    return pref * value


def norm_power_budget(params: SystemParams) -> float:
    """The power budget p_max in normalized units."""
    return params.d * snr_gamma(params) / (params.delta_s * params.phi) * params.p_max


@dataclass(frozen=True)
class NormalizedDesign:
    """Dimensionless design point (n_beams, upsilon, zeta)."""

    n_beams: int
    upsilon: float
    zeta: float
    feasible: bool  # upsilon above its minimum and zeta above the power floor


def normalize(
    params: SystemParams, u_th: float, rho: float, n_beams: int
) -> NormalizedDesign:
    """Map a physical design (u_th, rho) to dimensionless (upsilon, zeta)."""
    step = params.delta_s * params.phi
    upsilon = u_th / step
    zeta = params.d * snr_gamma(params) * rho / (step * upsilon) - 1.0
    shrink, nonneg = trigger_width_branches(n_beams)
    u_hat = norm_comm_width(upsilon, n_beams)
    feasible = upsilon >= max(shrink, nonneg) and zeta >= u_hat / upsilon - 1.0
    return NormalizedDesign(n_beams=n_beams, upsilon=upsilon, zeta=zeta, feasible=feasible)


def denormalize(params: SystemParams, design: NormalizedDesign) -> tuple[float, float]:
    """Inverse of :func:`normalize`: recover (u_th, rho)."""
    step = params.delta_s * params.phi
    u_th = design.upsilon * step
    rho = (1.0 + design.zeta) * step * design.upsilon / (params.d * snr_gamma(params))
    return u_th, rho


@dataclass(frozen=True)
class CyclePerformance:
    """Physical and normalized average rate/power of one cycle."""

    avg_rate: float    # bit/s
    avg_power: float   # power units
    norm_rate: float   # ln(2) * avg_rate / w_tot
    norm_power: float  # d*gamma/(delta_s*phi) * avg_power


def cycle_performance(
    params: SystemParams, n_beams: int, u_th: float, rho: float
) -> CyclePerformance:
    """Evaluate both metric pairs for a physical design point."""
    r_bar = avg_rate_closed(params, n_beams, u_th, rho)
    p_bar = avg_power_closed(params, n_beams, u_th, rho)
    return CyclePerformance(
        avg_rate=r_bar,
        avg_power=p_bar,
        norm_rate=LN2 * r_bar / params.w_tot,
        norm_power=params.d * snr_gamma(params) / (params.delta_s * params.phi) * p_bar,
    )
