import math

import numpy as np
import pytest

from beamcycle import (
    FeasibilityError,
    best_upsilon,
    feasibility_bounds,
    max_beams,
    max_upsilon,
    min_upsilon,
    norm_power,
    norm_power_budget,
    norm_rate,
    optimize_design,
    rate_slope,
    tight_zeta,
)
from beamcycle.optimize import beam_count_threshold

from conftest import make_params


class TestBounds:
    @pytest.mark.parametrize("n,expected", [(2, 4.0), (3, 4.0), (5, 6.0)])
    def test_min_upsilon(self, n, expected):
        assert min_upsilon(n) == pytest.approx(expected, rel=1e-15)

    def test_max_upsilon_hand_values(self):
        assert max_upsilon(2, 100.0) == pytest.approx(
            4.0 + 200.0 * (1.0 + math.sqrt(1.04)), rel=1e-12
        )
        assert max_upsilon(3, 1.0) == pytest.approx(
            4.0 + 1.5 * (1.0 + math.sqrt(7.0)), rel=1e-12
        )

    def test_max_upsilon_collapses_with_budget(self):
        assert max_upsilon(2, 1e-12) == pytest.approx(4.0, abs=1e-4)

    def test_max_upsilon_is_power_boundary(self):
        for n, budget in ((2, 100.0), (3, 1.0), (6, 10.0)):
            hi = max_upsilon(n, budget)
            assert norm_power(n, hi, 0.0) == pytest.approx(budget, rel=1e-10)

    def test_feasibility_bounds_always_ok_for_small_counts(self):
        for budget in (1e-6, 0.1, 1.0, 100.0):
            for n in (2, 3, 4):
                assert feasibility_bounds(n, budget).feasible

    def test_feasibility_flag_matches_window(self):
        bounds = feasibility_bounds(9, 1.0)
        assert bounds.feasible == (bounds.upsilon_min <= bounds.upsilon_max)
        assert not bounds.feasible


class TestMaxBeams:
    @pytest.mark.parametrize("budget,expected", [(1.0, 5), (0.1, 4), (3.0, 6)])
    def test_hand_values(self, budget, expected):
        assert max_beams(budget) == expected

    def test_threshold_values(self):
        assert beam_count_threshold(5) == pytest.approx(2.0 / 7.0, rel=1e-15)
        assert beam_count_threshold(6) == pytest.approx(32.0 / 14.0, rel=1e-15)
        assert beam_count_threshold(7) == pytest.approx(128.0 / 23.0, rel=1e-15)

    def test_nondecreasing_in_budget(self):
        budgets = np.logspace(-3, 4, 40)
        counts = [max_beams(float(b)) for b in budgets]
        assert all(b >= a for a, b in zip(counts, counts[1:]))
        assert min(counts) >= 4

    def test_included_counts_are_feasible(self):
        for budget in (0.05, 0.5, 5.0, 50.0):
            for n in range(2, max_beams(budget) + 1):
                assert feasibility_bounds(n, budget).feasible


class TestTightZeta:
    def test_hand_value(self):
        assert tight_zeta(8.0, 2, 1.5) == pytest.approx(0.25, rel=1e-12)
        assert norm_power(2, 8.0, tight_zeta(8.0, 2, 1.5)) == pytest.approx(
            1.5, rel=1e-12
        )

    def test_zero_when_budget_spent_at_zero_headroom(self):
        assert tight_zeta(8.0, 2, 0.5) == pytest.approx(0.0, abs=1e-14)

    def test_zero_at_max_upsilon(self):
        for n, budget in ((2, 1.5), (4, 20.0)):
            assert tight_zeta(max_upsilon(n, budget), n, budget) == pytest.approx(
                0.0, abs=1e-9
            )

    def test_power_round_trip(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            budget = float(rng.uniform(0.05, 50.0))
            n = int(rng.integers(2, max_beams(budget) + 1))
            lo = (n * n + 3.0 * n - 2.0) / (2.0 * (n - 1.0))
            ups = float(rng.uniform(lo * 1.001, max_upsilon(n, budget)))
            zeta = tight_zeta(ups, n, budget)
            assert norm_power(n, ups, zeta) == pytest.approx(budget, rel=1e-10)

    def test_singular_at_comm_width(self):
        with pytest.raises(ValueError, match="singular"):
            tight_zeta(4.0, 2, 1.0)  # upsilon equals the post-sweep width

    def test_beyond_max_upsilon_is_infeasible(self):
        with pytest.raises(FeasibilityError):
            tight_zeta(max_upsilon(2, 1.0) * 1.01, 2, 1.0)


class TestRateSlope:
    def test_domain(self):
        with pytest.raises(ValueError):
            rate_slope(4.0, 2, 1.0)
        with pytest.raises(ValueError):
            rate_slope(max_upsilon(2, 1.0) * 1.001, 2, 1.0)

    @pytest.mark.parametrize("budget", [0.1, 1.0, 10.0, 100.0])
    def test_boundary_signs(self, budget):
        for n in range(2, max_beams(budget) + 1):
            lo = (n * n + 3.0 * n - 2.0) / (2.0 * (n - 1.0))
            assert rate_slope(lo * (1.0 + 1e-9), n, budget) > 0.0
            assert rate_slope(max_upsilon(n, budget), n, budget) < 0.0

    @pytest.mark.parametrize("budget", [0.1, 1.0, 10.0, 100.0])
    def test_strictly_decreasing(self, budget):
        for n in range(2, max_beams(budget) + 1):
            lo = (n * n + 3.0 * n - 2.0) / (2.0 * (n - 1.0))
            grid = np.linspace(lo * (1.0 + 1e-7), max_upsilon(n, budget), 100)
            values = [rate_slope(float(u), n, budget) for u in grid]
            assert all(b < a for a, b in zip(values, values[1:]))

    def test_sign_matches_finite_difference(self):
        rng = np.random.default_rng(11)
        for budget in (0.1, 1.0, 10.0, 100.0):
            for n in range(2, max_beams(budget) + 1):
                lo = (n * n + 3.0 * n - 2.0) / (2.0 * (n - 1.0))
                hi = max_upsilon(n, budget)
                for _ in range(50):
                    ups = float(rng.uniform(lo * (1 + 1e-5), hi * (1 - 1e-5)))
                    h = 1e-6 * ups
                    rp = norm_rate(n, ups + h, tight_zeta(ups + h, n, budget))
                    rm = norm_rate(n, ups - h, tight_zeta(ups - h, n, budget))
                    fd = (rp - rm) / (2.0 * h)
                    if abs(fd) <= 1e-9:
                        continue
                    assert math.copysign(1.0, fd) == math.copysign(
                        1.0, rate_slope(ups, n, budget)
                    ), (budget, n, ups)


class TestBestUpsilon:
    def test_root_residual(self):
        ups = best_upsilon(2, 1.5)
        assert abs(rate_slope(ups, 2, 1.5)) < 1e-6

    def test_local_maximum(self):
        for n, budget in ((2, 1.5), (3, 10.0)):
            ups = best_upsilon(n, budget, tol=1e-12)
            delta = 10.0 * 1e-12 * max_upsilon(n, budget)
            here = norm_rate(n, ups, tight_zeta(ups, n, budget))
            for cand in (ups - delta, ups + delta):
                assert norm_rate(n, cand, tight_zeta(cand, n, budget)) <= here + 1e-15

    def test_clamped_for_many_beams(self):
        # With 6+ beams at modest budget the unconstrained root sits below
        # the beamwidth-nonnegativity bound and must be clamped onto it.
        budget = beam_count_threshold(6) * 1.05
        ups = best_upsilon(6, budget)
        assert ups == 0.5 * 5 * 4
        assert ups == min_upsilon(6)

    def test_within_window(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            budget = float(rng.uniform(0.05, 100.0))
            n = int(rng.integers(2, max_beams(budget) + 1))
            ups = best_upsilon(n, budget)
            assert min_upsilon(n) <= ups <= max_upsilon(n, budget) * (1 + 1e-12)

    def test_infeasible_count_rejected(self):
        with pytest.raises(FeasibilityError):
            best_upsilon(6, 1.0)


class TestOptimizeDesign:
    def test_power_constraint_tight(self, params):
        design = optimize_design(params)
        assert design.avg_power == pytest.approx(params.p_max, rel=1e-8)
        assert design.zeta >= 0.0

    def test_deterministic(self, params):
        a = optimize_design(params)
        b = optimize_design(params)
        assert a == b

    def test_candidates_cover_all_counts(self, params):
        design = optimize_design(params)
        budget = norm_power_budget(params)
        counts = [n for n, _, _ in design.per_beam_count]
        assert counts == list(range(2, max_beams(budget) + 1))
        rates = {n: r for n, _, r in design.per_beam_count}
        assert rates[design.n_beams] == max(rates.values())

    def test_tie_break_prefers_fewer_beams(self, params):
        design = optimize_design(params)
        for n, _, rate in design.per_beam_count:
            if n < design.n_beams:
                assert rate < rates_of(design, design.n_beams)

    def test_scale_invariance(self):
        # Rescaling every system constant while preserving the normalized
        # budget leaves the normalized optimum untouched.
        base = make_params()
        scaled = make_params(
            w_tot=3.3e9,
            d=25.0,
            delta_s=2e-5,
            phi=12.0,
            wavelength=8e-3,
            xi=0.7,
        )
        ratio = norm_power_budget(base) / norm_power_budget(scaled)
        scaled = make_params(
            w_tot=3.3e9,
            d=25.0,
            delta_s=2e-5,
            phi=12.0,
            wavelength=8e-3,
            xi=0.7,
            p_max=base.p_max * ratio,
        )
        a = optimize_design(base)
        b = optimize_design(scaled)
        assert a.n_beams == b.n_beams
        assert a.upsilon == pytest.approx(b.upsilon, rel=1e-9)
        assert a.zeta == pytest.approx(b.zeta, rel=1e-9)

    def test_rejects_drift(self):
        with pytest.raises(ValueError, match="drift"):
            optimize_design(make_params(v_drift=1.0))


def rates_of(design, n):
    return next(r for count, _, r in design.per_beam_count if count == n)
