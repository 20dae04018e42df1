"""Rate-maximizing cycle design under an average power budget.

The normalized problem is solved per beam count: the power constraint is
always tight at the optimum, which pins ``zeta`` as a function of
``upsilon`` (``tight_zeta``); along that curve the normalized rate is
unimodal in ``upsilon`` with a sign surrogate of its derivative
(``rate_slope``) that decreases strictly, so the inner maximization reduces
to bisection. The outer search over the beam count is exhaustive up to
``max_beams``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import FeasibilityError
from .params import SystemParams, snr_gamma
from .performance import (
    avg_power_closed,
    avg_rate_closed,
    norm_comm_width,
    norm_power,
    norm_power_budget,
    norm_rate,
)
from .sweep import trigger_width_branches

# Relative nudge away from the pole of tight_zeta at the lower bracket end.
_BRACKET_EPS = 1e-9

_MAX_BEAMS_CAP = 10**6


def min_upsilon(n_beams: int) -> float:
    """Smallest feasible normalized trigger width for ``n_beams`` beams."""
    return max(trigger_width_branches(n_beams))


def max_upsilon(n_beams: int, p_hat_max: float) -> float:
    """Largest ``upsilon`` whose zero-headroom power fits the budget.

    At ``upsilon = max_upsilon`` the normalized power at zeta = 0 equals
    ``p_hat_max`` exactly, so no headroom is left for the water level.
    """
    if n_beams < 2:
        raise ValueError(f"need at least 2 sweeping beams, got {n_beams!r}")
    if p_hat_max <= 0.0:
        raise ValueError(f"p_hat_max must be positive, got {p_hat_max!r}")
    n = float(n_beams)
    shrink = (n * n + 3.0 * n - 2.0) / (2.0 * (n - 1.0))
    return shrink + n * p_hat_max / (n - 1.0) * (
        1.0 + math.sqrt(1.0 + 2.0 * n / p_hat_max)
    )


@dataclass(frozen=True)
class FeasibilityBounds:
    """Feasible upsilon window for one beam count."""

    n_beams: int
    upsilon_min: float
    upsilon_max: float
    feasible: bool


def feasibility_bounds(n_beams: int, p_hat_max: float) -> FeasibilityBounds:
    lo = min_upsilon(n_beams)
    hi = max_upsilon(n_beams, p_hat_max)
    return FeasibilityBounds(n_beams, lo, hi, feasible=lo <= hi)


def beam_count_threshold(n_beams: int) -> float:
    """Normalized power needed to keep ``n_beams >= 5`` beams feasible.

    Increasing in the beam count; 2..4 beams are feasible at any budget.
    """
    if n_beams < 5:
        return 0.0
    n = float(n_beams)
    return 0.5 * (n * n - 5.0 * n + 2.0) ** 2 / (n * n - 4.0 * n + 2.0)


def max_beams(p_hat_max: float) -> int:
    """Largest beam count kept in the search at budget ``p_hat_max``.

    Uses the closed-form threshold, which is increasing in the beam count;
    the result is always at least 4.
    """
    if p_hat_max <= 0.0:
        raise ValueError(f"p_hat_max must be positive, got {p_hat_max!r}")
    n = 5
    while beam_count_threshold(n) <= p_hat_max:
        n += 1
        if n > _MAX_BEAMS_CAP:
            raise RuntimeError(
                f"beam count search exceeded {_MAX_BEAMS_CAP}; "
                f"p_hat_max = {p_hat_max} is implausibly large"
            )
    return n - 1


def tight_zeta(upsilon: float, n_beams: int, p_hat_max: float) -> float:
    """Water-level headroom that makes the power constraint tight.

    Solves norm_power(n_beams, upsilon, zeta) = p_hat_max for zeta >= 0.
    Singular at upsilon equal to the post-sweep width (no data phase);
    negative results mean ``upsilon`` exceeds ``max_upsilon`` and are
    rejected as infeasible.
    """
    n = float(n_beams)
    u_hat = norm_comm_width(upsilon, n_beams)
    if upsilon <= u_hat:
        raise ValueError(
            f"upsilon = {upsilon} does not exceed the post-sweep width "
            f"{u_hat}; the power-tight headroom is singular there"
        )
    slack = p_hat_max - norm_power(n_beams, upsilon, 0.0)
    if slack < -1e-12 * p_hat_max:
        raise FeasibilityError(
            f"upsilon = {upsilon} needs more than the power budget even at "
            f"zero headroom (exceeds max_upsilon = {max_upsilon(n_beams, p_hat_max)})"
        )
    zeta = (
        (n - 1.0)
        * (upsilon + n / 2.0 - 1.0)
        / (n * upsilon * (upsilon - u_hat))
        * slack
    )
    return max(zeta, 0.0)


def rate_slope(upsilon: float, n_beams: int, p_hat_max: float) -> float:
    """Sign surrogate for d(norm_rate)/d(upsilon) along the power-tight curve.

    Positive where widening the trigger width still pays, negative past the
    optimum; strictly decreasing in ``upsilon``. Defined on the open
    interval between the shrinkage bound and ``max_upsilon``.
    """
    n = float(n_beams)
    shrink = (n * n + 3.0 * n - 2.0) / (2.0 * (n - 1.0))
    if upsilon <= shrink:
        raise ValueError(
            f"upsilon = {upsilon} at or below the shrinkage bound {shrink}"
        )
    hi = max_upsilon(n_beams, p_hat_max)
    if upsilon > hi * (1.0 + 1e-12):
        raise ValueError(f"upsilon = {upsilon} above max_upsilon = {hi}")
    u_hat = norm_comm_width(upsilon, n_beams)
    zeta = tight_zeta(upsilon, n_beams, p_hat_max)
    w = upsilon + n / 2.0 - 1.0
    return (
        -(upsilon - u_hat) / (upsilon * (1.0 + zeta)) * ((n - 1.0) * w + 2.0 * n) / (2.0 * n)
        - (n - 1.0) * w / (n * (1.0 + zeta)) * zeta
        + n * math.log1p(zeta)
        + (n / 2.0 + 1.0) * math.log(upsilon / u_hat)
    )


def slope_root(n_beams: int, p_hat_max: float, tol: float = 1e-10) -> float:
    """Unique zero of ``rate_slope`` in its sign-change bracket, by bisection."""
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if n_beams > max_beams(p_hat_max):
        raise FeasibilityError(
            f"{n_beams} beams infeasible at normalized budget {p_hat_max} "
            f"(max {max_beams(p_hat_max)})"
        )
    n = float(n_beams)
    shrink = (n * n + 3.0 * n - 2.0) / (2.0 * (n - 1.0))
    lo = shrink * (1.0 + _BRACKET_EPS)
    hi = max_upsilon(n_beams, p_hat_max)
    f_lo = rate_slope(lo, n_beams, p_hat_max)
    f_hi = rate_slope(hi, n_beams, p_hat_max)
    if f_lo <= 0.0 or f_hi >= 0.0:
        # The slope surrogate is provably positive at the lower end and
        # negative at max_upsilon; anything else is a transcription bug.
        raise RuntimeError(
            f"no sign change for {n_beams} beams: slope({lo}) = {f_lo}, "
            f"slope({hi}) = {f_hi}"
        )
    for _ in range(200):
        if hi - lo <= tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if rate_slope(mid, n_beams, p_hat_max) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def best_upsilon(n_beams: int, p_hat_max: float, tol: float = 1e-10) -> float:
    """Rate-maximizing ``upsilon`` for a fixed beam count.

    Bisects ``rate_slope`` on its sign-change bracket, then clamps to the
    beamwidth-nonnegativity bound (which binds only for 5+ beams).
    """
    n = float(n_beams)
    return max(0.5 * (n - 1.0) * (n - 2.0), slope_root(n_beams, p_hat_max, tol))


@dataclass(frozen=True)
class OptimalDesign:
    """Global optimum with both normalized and physical coordinates."""

    n_beams: int
    upsilon: float
    zeta: float
    u_th: float      # m
    rho: float       # power units
    avg_rate: float  # bit/s
    avg_power: float
    per_beam_count: tuple[tuple[int, float, float], ...]  # (n, upsilon*, norm_rate)


def optimize_design(params: SystemParams, tol: float = 1e-10) -> OptimalDesign:
    """Maximize the average rate subject to the average power budget.

    Solves the normalized per-beam-count problems by bisection, picks the
    best beam count exhaustively (ties toward fewer beams), and converts
    back to physical units. The power constraint is tight at the result.
    """
    params.require_zero_drift()
    p_hat_max = norm_power_budget(params)
    candidates = []
    best = None
    for n in range(2, max_beams(p_hat_max) + 1):
        ups = best_upsilon(n, p_hat_max, tol=tol)
        zeta = tight_zeta(ups, n, p_hat_max)
        rate = norm_rate(n, ups, zeta)
        candidates.append((n, ups, rate))
        if best is None or rate > best[2]:
            best = (n, ups, rate)
    n_star, ups_star, _ = best
    zeta_star = tight_zeta(ups_star, n_star, p_hat_max)
    step = params.delta_s * params.phi
    u_th_star = ups_star * step
    rho_star = (1.0 + zeta_star) * step * ups_star / (params.d * snr_gamma(params))
    return OptimalDesign(
        n_beams=n_star,
        upsilon=ups_star,
        zeta=zeta_star,
        u_th=u_th_star,
        rho=rho_star,
        avg_rate=avg_rate_closed(params, n_star, u_th_star, rho_star),
        avg_power=avg_power_closed(params, n_star, u_th_star, rho_star),
        per_beam_count=tuple(candidates),
    )
