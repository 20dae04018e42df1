"""Beam-sweeping / data-communication cycle design for mobile mm-wave links.

A roadside base station tracks a user moving along a road with bounded but
unknown speed. Between sweeps its uncertainty about the user's position
grows linearly; when the uncertainty width reaches a trigger value the BS
sweeps it with a short burst of widening probe beams, then communicates
over a narrow beam that widens with the uncertainty until the next sweep.

The package provides the sweep-schedule geometry, closed-form cycle
average rate/power under water-filling, the dimensionless design space and
its constrained rate maximization, a fixed-beamwidth comparison scheme,
and independent verification by Monte Carlo simulation and numerical
quadrature.
"""

from .baseline import BaselineConfig, comm_fraction, power_for_avg, rate_and_power
from .errors import FeasibilityError
from .optimize import (
    FeasibilityBounds,
    OptimalDesign,
    best_upsilon,
    feasibility_bounds,
    max_beams,
    max_upsilon,
    min_upsilon,
    optimize_design,
    rate_slope,
    slope_root,
    tight_zeta,
)
from .params import SystemParams, snr_gamma
from .performance import (
    CyclePerformance,
    NormalizedDesign,
    PowerProfile,
    avg_power_closed,
    avg_rate_closed,
    cycle_performance,
    denormalize,
    instantaneous_rate,
    norm_comm_width,
    norm_power,
    norm_power_budget,
    norm_rate,
    normalize,
    waterfilling_power,
    waterfilling_profile,
)
from .sweep import (
    SweepSchedule,
    UncertaintyInterval,
    build_schedule,
    comm_width,
    cycle_duration,
    min_u_th,
    uncertainty_after,
    validate_small_angle,
)
from .validation import (
    CheckResult,
    SpeedProcess,
    TrajectoryResult,
    avg_power_numeric,
    avg_rate_numeric,
    coverage_suite,
    jensen_check,
    quadrature_suite,
    run_all,
    simulate_cycle,
    slope_sign_suite,
    write_report,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "CheckResult",
    "CyclePerformance",
    "FeasibilityBounds",
    "FeasibilityError",
    "NormalizedDesign",
    "OptimalDesign",
    "PowerProfile",
    "SpeedProcess",
    "SweepSchedule",
    "SystemParams",
    "TrajectoryResult",
    "UncertaintyInterval",
    "avg_power_closed",
    "avg_power_numeric",
    "avg_rate_closed",
    "avg_rate_numeric",
    "best_upsilon",
    "build_schedule",
    "comm_fraction",
    "comm_width",
    "coverage_suite",
    "cycle_duration",
    "cycle_performance",
    "denormalize",
    "feasibility_bounds",
    "instantaneous_rate",
    "jensen_check",
    "max_beams",
    "max_upsilon",
    "min_u_th",
    "min_upsilon",
    "norm_comm_width",
    "norm_power",
    "norm_power_budget",
    "norm_rate",
    "normalize",
    "optimize_design",
    "power_for_avg",
    "quadrature_suite",
    "rate_and_power",
    "rate_slope",
    "run_all",
    "simulate_cycle",
    "slope_root",
    "slope_sign_suite",
    "snr_gamma",
    "tight_zeta",
    "uncertainty_after",
    "validate_small_angle",
    "waterfilling_power",
    "waterfilling_profile",
    "write_report",
]
