"""Independent verification of the cycle model.

Three families of checks, none of which share algebra with the closed
forms they test:

* trajectory Monte Carlo of the sweep protocol -- every user starting in
  the trigger interval must be caught by some beam during that beam's own
  microslot (full coverage), and the post-sweep position must fall in a
  window of width ``u_comm`` regardless of which beam won;
* adaptive midpoint quadrature of the defining rate/power integrals,
  refined until self-consistent, against the closed forms;
* random power profiles with matched average power, which can never beat
  the water-filling profile's average rate.

Per-trajectory randomness is drawn up front into tables addressed by
trajectory index, so chunked, parallel, and serial evaluation produce
bit-identical results for a given master seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .optimize import max_beams, max_upsilon, min_upsilon, rate_slope, tight_zeta
from .params import SystemParams, snr_gamma
from .performance import (
    _check_cycle_inputs,
    avg_power_closed,
    avg_rate_closed,
    norm_comm_width,
    norm_rate,
    waterfilling_power,
)
from .sweep import SweepSchedule, build_schedule

SPEED_KINDS = ("constant-extreme", "piecewise-constant-uniform", "bang-bang")

# Integration steps per microslot; speeds are constant within a step, so
# explicit Euler is exact at this resolution.
RESOLUTION = 100

# Interval-membership slack relative to u_th, covering accumulated rounding
# in the position cumsum ("integration resolution" in the checks below).
_MEMBERSHIP_SLACK = 1e-9


@dataclass(frozen=True)
class SpeedProcess:
    """Random speed process bounded by +/- phi/2.

    ``dwell`` is the hold time between speed changes for the piecewise
    kinds; it is snapped to a whole number of integration steps so the
    Euler trajectory stays exact.
    """

    kind: str
    seed: int
    dwell: float = 0.0  # s; defaults to one microslot when <= 0

    def __post_init__(self):
        if self.kind not in SPEED_KINDS:
            raise ValueError(f"unknown speed process kind {self.kind!r}")


@dataclass(frozen=True)
class TrajectoryResult:
    """Outcome of one simulated sweep for one trajectory."""

    true_positions: np.ndarray  # sampled positions over the sweep phase, m
    detected_beam: int          # 1-based beam index; 0 if never scanned (cannot happen)
    covered: bool
    final_width_ok: bool        # final position inside the beam's u_comm window


@dataclass(frozen=True)
class _SpeedDraws:
    """Fixed-layout random inputs for a batch of trajectories."""

    sign: np.ndarray    # +/-1 per trajectory
    offset: np.ndarray  # switch-phase offset in steps
    levels: np.ndarray  # uniform speed per dwell segment


def _n_segments(n_steps: int, dwell_steps: int) -> int:
    return (n_steps + dwell_steps - 1) // dwell_steps + 1


def _speed_draws(
    rng: np.random.Generator, n_traj: int, n_steps: int, dwell_steps: int, phi: float
) -> _SpeedDraws:
    return _SpeedDraws(
        sign=rng.integers(0, 2, size=n_traj) * 2 - 1,
        offset=rng.integers(0, dwell_steps, size=n_traj),
        levels=rng.uniform(
            -0.5 * phi, 0.5 * phi, size=(n_traj, _n_segments(n_steps, dwell_steps))
        ),
    )


def _speeds_from_draws(
    kind: str,
    draws: _SpeedDraws,
    rows: np.ndarray,
    n_steps: int,
    dwell_steps: int,
    phi: float,
) -> np.ndarray:
    """Per-step speeds for the trajectories ``rows``, shape (len(rows), n_steps)."""
    half = 0.5 * phi
    sign = draws.sign[rows]
    if kind == "constant-extreme":
        return np.repeat(sign[:, None] * half, n_steps, axis=1).astype(float)
    seg = (np.arange(n_steps)[None, :] + draws.offset[rows, None]) // dwell_steps
    if kind == "bang-bang":
        return sign[:, None] * half * np.where(seg % 2 == 0, 1.0, -1.0)
    return np.take_along_axis(draws.levels[rows], seg, axis=1)


def _positions(p0: np.ndarray, speeds: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty((speeds.shape[0], speeds.shape[1] + 1))
    out[:, 0] = p0
    np.cumsum(speeds * dt, axis=1, out=out[:, 1:])
    out[:, 1:] += p0[:, None]
    return out


def _detect(
    schedule: SweepSchedule,
    positions: np.ndarray,
    delta_s_phi: float,
    resolution: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized detection over trajectories.

    ``positions`` has shape (n_traj, n_beams*resolution + 1). A beam
    detects a trajectory if the position lies in its scan interval at any
    sampled time of its own microslot (slot boundaries belong to both
    adjacent slots); the first such beam wins. Returns (covered, detected
    1-based, final_ok).
    """
    n = schedule.n_beams
    slack = _MEMBERSHIP_SLACK * schedule.u_th
    detected = np.zeros(positions.shape[0], dtype=np.int64)
    for i, (a, b) in enumerate(schedule.intervals):
        window = positions[:, i * resolution : (i + 1) * resolution + 1]
        inside = np.any((window >= a - slack) & (window <= b + slack), axis=1)
        np.copyto(detected, i + 1, where=inside & (detected == 0))
    covered = detected > 0

    final = positions[:, n * resolution]
    a_arr = np.array([iv[0] for iv in schedule.intervals])
    b_arr = np.array([iv[1] for iv in schedule.intervals])
    idx = np.maximum(detected - 1, 0)
    # Motion after detection can spread the position by (n+1-i) microslots
    # of drift around the winning beam's scan interval; that window has
    # width u_comm for every beam.
    grow = (n + 1 - detected.astype(float)) * 0.5 * delta_s_phi
    lo = a_arr[idx] - grow
    hi = b_arr[idx] + grow
    final_ok = covered & (final >= lo - slack) & (final <= hi + slack)
    return covered, detected, final_ok


def simulate_cycle(
    params: SystemParams,
    schedule: SweepSchedule,
    process: SpeedProcess,
    p0: float,
    resolution: int = RESOLUTION,
) -> TrajectoryResult:
    """Simulate one trajectory through the sweep phase of a cycle.

    ``p0`` is the start-of-cycle position in the schedule's local frame,
    so it must lie in [0, u_th]. Identical inputs (including the process
    seed) produce bit-identical results.
    """
    params.require_zero_drift()
    if not 0.0 <= p0 <= schedule.u_th:
        raise ValueError(
            f"p0 = {p0} outside the start-of-cycle uncertainty interval "
            f"[0, {schedule.u_th}]"
        )
    if resolution < 100:
        raise ValueError(f"resolution must be at least 100, got {resolution!r}")
    dt = params.delta_s / resolution
    n_steps = schedule.n_beams * resolution
    dwell = process.dwell if process.dwell > 0.0 else params.delta_s
    dwell_steps = max(1, round(dwell / dt))
    rng = np.random.default_rng(np.random.SeedSequence(process.seed))
    draws = _speed_draws(rng, 1, n_steps, dwell_steps, params.phi)
    speeds = _speeds_from_draws(
        process.kind, draws, np.array([0]), n_steps, dwell_steps, params.phi
    )
    positions = _positions(np.array([p0]), speeds, dt)
    covered, detected, final_ok = _detect(
        schedule, positions, params.delta_s * params.phi, resolution
    )
    return TrajectoryResult(
        true_positions=positions[0],
        detected_beam=int(detected[0]),
        covered=bool(covered[0]),
        final_width_ok=bool(final_ok[0]),
    )


# ---------------------------------------------------------------------------
# Numerical quadrature of the defining integrals
# ---------------------------------------------------------------------------


def _refine_midpoint(f, a: float, b: float, rel_tol: float) -> float:
    """Composite midpoint with doubling and one Richardson extrapolation.

    Refines until two successive estimates agree to ``rel_tol``; the
    returned value is the extrapolated one.
    """
    if b <= a:
        return 0.0
    n = 64
    x = a + (b - a) * (np.arange(n) + 0.5) / n
    prev = (b - a) * float(np.mean(f(x)))
    while n <= 2**23:
        n *= 2
        x = a + (b - a) * (np.arange(n) + 0.5) / n
        cur = (b - a) * float(np.mean(f(x)))
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-300):
            return (4.0 * cur - prev) / 3.0
        prev = cur
    raise RuntimeError(f"quadrature did not self-converge to {rel_tol} by n = {n}")


def avg_rate_numeric(
    params: SystemParams,
    n_beams: int,
    u_th: float,
    rho: float,
    rel_tol: float = 1e-9,
) -> float:
    """Cycle-averaged rate (bit/s) by direct quadrature of the rate integral."""
    gamma, u_c, t_cycle = _check_cycle_inputs(params, n_beams, u_th, rho)
    t0 = n_beams * params.delta_s
    # The integrand is identically zero once the width outgrows the water
    # level (the (.)+ in the power), so that tail is skipped exactly.
    level = params.d * gamma * rho
    t_hi = t_cycle if level >= u_th else t0 + (level - u_c) / params.phi

    def integrand(t):
        u = u_c + params.phi * (t - t0)
        p = np.maximum(0.0, rho - u / (params.d * gamma))
        return np.log2(1.0 + gamma * p / (u / params.d))

    return params.w_tot / t_cycle * _refine_midpoint(integrand, t0, t_hi, rel_tol)


def avg_power_numeric(
    params: SystemParams,
    n_beams: int,
    u_th: float,
    rho: float,
    rel_tol: float = 1e-9,
) -> float:
    """Cycle-averaged power by direct quadrature of the power integral."""
    gamma, u_c, t_cycle = _check_cycle_inputs(params, n_beams, u_th, rho)
    t0 = n_beams * params.delta_s
    level = params.d * gamma * rho
    t_hi = t_cycle if level >= u_th else t0 + (level - u_c) / params.phi

    def integrand(t):
        u = u_c + params.phi * (t - t0)
        return np.maximum(0.0, rho - u / (params.d * gamma))

    return _refine_midpoint(integrand, t0, t_hi, rel_tol) / t_cycle


# ---------------------------------------------------------------------------
# Check reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    """One verification suite's outcome; rows of the report CSV."""

    check_name: str
    n_cases: int
    n_failures: int
    worst_residual: float

    @property
    def passed(self) -> bool:
        return self.n_failures == 0


def write_report(results: Iterable[CheckResult], stream: TextIO) -> None:
    stream.write("check_name,n_cases,n_failures,worst_residual\n")
    for r in results:
        stream.write(
            f"{r.check_name},{r.n_cases},{r.n_failures},{r.worst_residual:.12g}\n"
        )


def jensen_check(
    params: SystemParams,
    n_beams: int,
    u_th: float,
    rho: float,
    n_perturbations: int = 1000,
    seed: int = 0,
    grid_points: int = 10_000,
) -> CheckResult:
    """Water-filling optimality check against random equal-power profiles.

    Draws nonnegative power profiles on a time grid over the data phase,
    rescaled to the water-filling profile's average power, and verifies
    none exceeds its average rate by more than 1e-9 (in nats per sample).
    The water-filling profile itself, a constant profile, and a shuffled
    copy of the water-filling profile are included as fixed cases.
    """
    gamma, u_c, t_cycle = _check_cycle_inputs(params, n_beams, u_th, rho)
    t0 = n_beams * params.delta_s
    t = t0 + (t_cycle - t0) * (np.arange(grid_points) + 0.5) / grid_points
    u = u_c + params.phi * (t - t0)
    gain = params.d * gamma / u  # per-sample SNR factor per unit power
    wf = np.array([waterfilling_power(rho, ui, params.d, gamma) for ui in u])
    budget = float(np.mean(wf))
    rate_wf = float(np.mean(np.log1p(gain * wf)))

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    worst = -math.inf
    failures = 0
    n_cases = 0

    def account(profiles: np.ndarray) -> None:
        nonlocal worst, failures, n_cases
        rates = np.mean(np.log1p(gain[None, :] * profiles), axis=1)
        excess = rates - rate_wf
        worst = max(worst, float(excess.max()))
        failures += int(np.sum(excess > 1e-9))
        n_cases += profiles.shape[0]

    account(wf[None, :])
    if budget > 0.0:
        account(np.full((1, grid_points), budget))
        account(rng.permutation(wf)[None, :])
        for start in range(0, n_perturbations, 100):
            m = min(100, n_perturbations - start)
            draws = rng.exponential(1.0, size=(m, grid_points))
            profiles = draws * (budget / np.mean(draws, axis=1))[:, None]
            account(profiles)
    else:
        account(np.zeros((n_perturbations + 2, grid_points)))
    return CheckResult("jensen_waterfilling", n_cases, failures, worst)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def quadrature_suite(
    params: SystemParams,
    n_tuples: int = 200,
    seed: int = 0,
    rel_tol: float = 1e-7,
    quad_tol: float = 1e-9,
    perturb_closed_form: float = 0.0,
) -> list[CheckResult]:
    """Closed forms vs quadrature over random feasible designs.

    Alternating tuples place the water level inside and above the cycle's
    width range so both branches of the closed forms are exercised.
    ``perturb_closed_form`` injects a relative error into the closed-form
    values (fault-injection self-test of this suite).
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    gamma = snr_gamma(params)
    step = params.delta_s * params.phi
    tuples = []
    for j in range(n_tuples):
        n = int(rng.integers(2, 9))
        ups = rng.uniform(min_upsilon(n) * (1.0 + 1e-6), 1000.0)
        u_th = ups * step
        u_c = norm_comm_width(ups, n) * step
        if j % 2 == 0:
            level = u_c + (u_th - u_c) * rng.uniform(0.05, 0.95)
        else:
            level = u_th * rng.uniform(1.05, 3.0)
        tuples.append((n, u_th, level / (params.d * gamma)))

    results = []
    for name, closed, numeric in (
        ("closed_vs_numeric_rate", avg_rate_closed, avg_rate_numeric),
        ("closed_vs_numeric_power", avg_power_closed, avg_power_numeric),
    ):
        worst = 0.0
        failures = 0
        for n, u_th, rho in tuples:
            reference = numeric(params, n, u_th, rho, rel_tol=quad_tol)
            value = closed(params, n, u_th, rho) * (1.0 + perturb_closed_form)
            rel = abs(value - reference) / max(abs(reference), 1e-300)
            worst = max(worst, rel)
            failures += rel > rel_tol
        results.append(CheckResult(name, n_tuples, failures, worst))
    return results


def coverage_suite(
    params: SystemParams,
    points: Sequence[tuple[int, float]] | None = None,
    n_traj: int = 100_000,
    seed: int = 0,
    resolution: int = RESOLUTION,
) -> list[CheckResult]:
    """Monte Carlo coverage and post-sweep width checks.

    ``points`` are (n_beams, upsilon) design points; the default set
    includes a minimum-width schedule whose first beam degenerates to zero
    width. Trajectories are split round-robin over the speed process kinds,
    with dwell equal to one microslot.
    """
    params.require_zero_drift()
    if points is None:
        points = ((2, 8.0), (3, 60.0), (5, 6.0))
    step = params.delta_s * params.phi
    dt = params.delta_s / resolution
    cover_fail = 0
    width_fail = 0
    worst_spread = 0.0
    n_cases = 0
    for n_beams, ups in points:
        schedule = build_schedule(params, ups * step, n_beams)
        n_steps = n_beams * resolution
        rng = np.random.default_rng(np.random.SeedSequence((seed, n_beams)))
        p0 = rng.uniform(0.0, schedule.u_th, size=n_traj)
        draws = _speed_draws(rng, n_traj, n_steps, resolution, params.phi)
        kind_idx = np.arange(n_traj) % len(SPEED_KINDS)
        final_lo = np.full(n_beams, np.inf)
        final_hi = np.full(n_beams, -np.inf)
        chunk = 4096
        for start in range(0, n_traj, chunk):
            rows = np.arange(start, min(start + chunk, n_traj))
            speeds = np.empty((rows.size, n_steps))
            for k, kind in enumerate(SPEED_KINDS):
                sel = kind_idx[rows] == k
                if sel.any():
                    speeds[sel] = _speeds_from_draws(
                        kind, draws, rows[sel], n_steps, resolution, params.phi
                    )
            positions = _positions(p0[rows], speeds, dt)
            covered, detected, final_ok = _detect(schedule, positions, step, resolution)
            cover_fail += int(np.sum(~covered))
            width_fail += int(np.sum(covered & ~final_ok))
            final = positions[:, n_steps]
            for b in range(1, n_beams + 1):
                hit = detected == b
                if hit.any():
                    final_lo[b - 1] = min(final_lo[b - 1], float(final[hit].min()))
                    final_hi[b - 1] = max(final_hi[b - 1], float(final[hit].max()))
        n_cases += n_traj
        spreads = final_hi - final_lo
        seen = np.isfinite(spreads)
        if seen.any():
            excess = float(np.max(spreads[seen] - schedule.u_comm)) / schedule.u_comm
            worst_spread = max(worst_spread, excess)
            width_fail += int(np.sum(spreads[seen] > schedule.u_comm * (1.0 + 1e-9)))
    return [
        CheckResult("sweep_coverage", n_cases, cover_fail, float(cover_fail)),
        CheckResult("post_sweep_width", n_cases, width_fail, worst_spread),
    ]


def slope_sign_suite(
    budgets: Sequence[float] = (0.1, 1.0, 10.0, 100.0),
    n_points: int = 50,
    seed: int = 0,
) -> list[CheckResult]:
    """Checks the slope surrogate against finite differences of the rate.

    At each feasible beam count: the surrogate must be positive just above
    the lower boundary, negative at ``max_upsilon``, and match the sign of
    a central difference of the power-tight rate at random interior points.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    sign_cases = sign_fail = 0
    bound_cases = bound_fail = 0
    worst = 0.0
    for budget in budgets:
        for n in range(2, max_beams(budget) + 1):
            shrink = (n * n + 3.0 * n - 2.0) / (2.0 * (n - 1.0))
            hi = max_upsilon(n, budget)
            bound_cases += 2
            if not rate_slope(shrink * (1.0 + 1e-9), n, budget) > 0.0:
                bound_fail += 1
            if not rate_slope(hi, n, budget) < 0.0:
                bound_fail += 1
            for _ in range(n_points):
                ups = rng.uniform(shrink * (1.0 + 1e-5), hi * (1.0 - 1e-5))
                h = 1e-6 * ups
                rp = norm_rate(n, ups + h, tight_zeta(ups + h, n, budget))
                rm = norm_rate(n, ups - h, tight_zeta(ups - h, n, budget))
                fd = (rp - rm) / (2.0 * h)
                if abs(fd) <= 1e-9:
                    continue  # too close to the optimum for a stable sign
                sign_cases += 1
                value = rate_slope(ups, n, budget)
                if math.copysign(1.0, fd) != math.copysign(1.0, value):
                    sign_fail += 1
                    worst = max(worst, abs(fd))
    return [
        CheckResult("slope_sign", sign_cases, sign_fail, worst),
        CheckResult("slope_boundaries", bound_cases, bound_fail, float(bound_fail)),
    ]


def run_all(
    params: SystemParams,
    seed: int = 0,
    perturb_closed_form: float = 0.0,
    n_tuples: int = 200,
    n_traj: int = 100_000,
    n_profiles: int = 1000,
) -> list[CheckResult]:
    """Every verification suite with shared defaults; rows for the report CSV."""
    results = quadrature_suite(
        params, n_tuples=n_tuples, seed=seed, perturb_closed_form=perturb_closed_form
    )
    step = params.delta_s * params.phi
    gamma = snr_gamma(params)
    u_th = 100.0 * step
    results.append(
        jensen_check(
            params,
            n_beams=2,
            u_th=u_th,
            rho=0.8 * u_th / (params.d * gamma),
            n_perturbations=n_profiles,
            seed=seed,
        )
    )
    results.extend(coverage_suite(params, n_traj=n_traj, seed=seed))
    results.extend(slope_sign_suite(seed=seed))
    return results
