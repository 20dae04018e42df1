"""Command-line interface: optimize, sweep, verify, baseline.

Configuration is a flat ``key = value`` text file whose keys match the
SystemParams fields (``lambda`` is accepted for the wavelength); every key
can be overridden by a flag. The noise PSD is taken in dBm/Hz on this
interface and converted to W/Hz internally. The sweep axis for speed is
``v_max`` with ``phi = 2 * v_max`` (symmetric speeds, zero drift).

Exit codes: 0 success, 1 verification failures, 2 infeasible problem,
3 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import __version__
from .baseline import BaselineConfig, comm_fraction, power_for_avg, rate_and_power
from .errors import FeasibilityError
from .optimize import OptimalDesign, optimize_design
from .params import SystemParams
from .performance import norm_power_budget
from .sweep import cycle_duration, validate_small_angle
from .validation import run_all, write_report

# Scenario defaults; phi follows v_max unless set explicitly, and n0 is in
# dBm/Hz at this boundary.
DEFAULTS = {
    "w_tot": 1.76e9,    # Hz
    "lambda": 5e-3,     # m (60 GHz carrier)
    "n0": -174.0,       # dBm/Hz
    "delta_s": 1e-5,    # s
    "d": 10.0,          # m
    "xi": 1.0,
    "vmax": 20.0,       # m/s
    "v_drift": 0.0,     # m/s
    "p_max": 1e-3,      # W
}

_CONFIG_KEYS = set(DEFAULTS) | {
    "phi",
    "wavelength",
    "axis",
    "values",
    "out",
    "seed",
    "beamwidth_deg",
    "pt",
}

_POWER_GRID = tuple(1e-4 * 10 ** (i / 4.0) for i in range(9))  # 1e-4 .. 1e-2 W
_SPEED_GRID = tuple(float(v) for v in range(5, 41, 5))         # m/s


def dbm_per_hz_to_w_per_hz(n0_dbm: float) -> float:
    return 10.0 ** (n0_dbm / 10.0 - 3.0)


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs."""

    params: SystemParams
    sweep_axis: str                  # "power" or "speed"
    axis_values: tuple[float, ...]
    baseline: BaselineConfig
    output_path: str | None
    seed: int


def _parse_config_file(path: str) -> dict:
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key == "axis":
                values[key] = val
            elif key == "values":
                values[key] = val
            elif key == "out":
                values[key] = val
            elif key == "seed":
                values[key] = int(val)
            else:
                values[key] = float(val)
    return values


def _parse_values(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ValueError(f"bad --values list {text!r}") from exc
    if not values:
        raise ValueError("--values must list at least one number")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"--values must be strictly increasing, got {text!r}")
    return values


def _build_config(args: argparse.Namespace) -> tuple[RunConfig, bool]:
    """Merge defaults, config file, and flags.

    Returns the config plus a flag marking a zero power budget, which the
    optimize command reports as a degenerate design instead of an error
    (the budget is replaced by a placeholder so SystemParams validates).
    """
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(_parse_config_file(args.config))
    for key in ("phi", "vmax", "pmax", "seed", "out"):
        flag = getattr(args, key, None)
        if flag is not None:
            cfg["p_max" if key == "pmax" else key] = flag
    if getattr(args, "values", None) is not None:
        cfg["values"] = args.values
    if getattr(args, "axis", None) is not None:
        cfg["axis"] = args.axis
    if getattr(args, "beamwidth_deg", None) is not None:
        cfg["beamwidth_deg"] = args.beamwidth_deg
    if getattr(args, "pt", None) is not None:
        cfg["pt"] = args.pt

    zero_power = cfg["p_max"] <= 0.0
    if zero_power:
        cfg["p_max"] = 1.0
    phi = cfg.get("phi", 2.0 * cfg["vmax"])
    params = SystemParams(
        w_tot=cfg["w_tot"],
        wavelength=cfg.get("wavelength", cfg["lambda"]),
        n0=dbm_per_hz_to_w_per_hz(cfg["n0"]),
        delta_s=cfg["delta_s"],
        d=cfg["d"],
        xi=cfg["xi"],
        phi=phi,
        p_max=cfg["p_max"],
        v_drift=cfg["v_drift"],
    )
    axis = cfg.get("axis", "power")
    if axis not in ("power", "speed"):
        raise ValueError(f"axis must be 'power' or 'speed', got {axis!r}")
    raw_values = cfg.get("values")
    if raw_values is None:
        values = _POWER_GRID if axis == "power" else _SPEED_GRID
    else:
        values = _parse_values(raw_values) if isinstance(raw_values, str) else raw_values
    baseline = BaselineConfig(
        beamwidth_deg=cfg.get("beamwidth_deg", 7.0),
        v_max=phi / 2.0,
        p_t=cfg.get("pt", 1.0),
    )
    config = RunConfig(
        params=params,
        sweep_axis=axis,
        axis_values=values,
        baseline=baseline,
        output_path=cfg.get("out"),
        seed=int(cfg.get("seed", 0)),
    )
    return config, zero_power


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _design_record(config: RunConfig, design: OptimalDesign) -> dict:
    params = config.params
    return {
        "n_beams": design.n_beams,
        "upsilon": design.upsilon,
        "zeta": design.zeta,
        "u_th_m": design.u_th,
        "rho": design.rho,
        "t_cycle_s": cycle_duration(params, design.u_th, design.n_beams),
        "spectral_efficiency_bit_s_hz": design.avg_rate / params.w_tot,
        "avg_rate_bit_s": design.avg_rate,
        "avg_power": design.avg_power,
    }


def cmd_optimize(config: RunConfig, as_json: bool, zero_power: bool = False) -> int:
    params = config.params
    if zero_power or norm_power_budget(params) < 1e-9:
        print(
            "warning: power budget is effectively zero; reporting the "
            "degenerate zero-rate design",
            file=sys.stderr,
        )
        record = {
            "n_beams": 2,
            "upsilon": 4.0,
            "zeta": 0.0,
            "u_th_m": 4.0 * params.delta_s * params.phi,
            "rho": 0.0,
            "t_cycle_s": cycle_duration(params, 4.0 * params.delta_s * params.phi, 2),
            "spectral_efficiency_bit_s_hz": 0.0,
            "avg_rate_bit_s": 0.0,
            "avg_power": 0.0,
        }
    else:
        design = optimize_design(params)
        record = _design_record(config, design)
        for warning in validate_small_angle(params, design.u_th):
            print(f"warning: {warning}", file=sys.stderr)
    if as_json:
        print(json.dumps(record, indent=2))
    else:
        for key, value in record.items():
            print(f"{key}: {_fmt(value) if isinstance(value, float) else value}")
    if config.output_path:
        keys = list(record)
        rows = ",".join(keys) + "\n" + ",".join(
            _fmt(record[k]) if isinstance(record[k], float) else str(record[k])
            for k in keys
        ) + "\n"
        _write_text(config.output_path, rows)
    return 0


def _sweep_point(config: RunConfig, value: float) -> dict:
    params = config.params
    if config.sweep_axis == "power":
        point_params = replace(params, p_max=value)
        baseline_cfg = config.baseline
        p_bar_target = value
    else:
        point_params = replace(params, phi=2.0 * value)
        baseline_cfg = replace(config.baseline, v_max=value)
        p_bar_target = params.p_max
    design = optimize_design(point_params)
    baseline_cfg = replace(
        baseline_cfg, p_t=power_for_avg(point_params, baseline_cfg, p_bar_target)
    )
    rate_11ad, _ = rate_and_power(point_params, baseline_cfg)
    return {
        "axis_value": value,
        "se_proposed": design.avg_rate / point_params.w_tot,
        "se_11ad": rate_11ad / point_params.w_tot,
        "eta_star": design.n_beams,
        "u_th_star_m": design.u_th,
        "p_bar": design.avg_power,
    }


def cmd_sweep(config: RunConfig) -> int:
    with ThreadPoolExecutor(max_workers=4) as pool:
        rows = list(pool.map(lambda v: _sweep_point(config, v), config.axis_values))
    if config.sweep_axis == "power":
        se = [row["se_proposed"] for row in rows]
        if any(b <= a for a, b in zip(se, se[1:])):
            raise RuntimeError(
                "spectral efficiency is not strictly increasing along the "
                f"power axis: {se}"
            )
    out = io.StringIO()
    out.write("axis_value,se_proposed,se_11ad,eta_star,u_th_star_m,p_bar\n")
    for row in rows:
        out.write(
            ",".join(
                _fmt(row[k]) if isinstance(row[k], float) else str(row[k])
                for k in ("axis_value", "se_proposed", "se_11ad", "eta_star", "u_th_star_m", "p_bar")
            )
            + "\n"
        )
    _write_text(config.output_path, out.getvalue())
    return 0


def cmd_verify(config: RunConfig, args: argparse.Namespace) -> int:
    results = run_all(
        config.params,
        seed=config.seed,
        perturb_closed_form=args.perturb_closed_form,
        n_tuples=args.tuples,
        n_traj=args.trajectories,
        n_profiles=args.profiles,
    )
    out = io.StringIO()
    write_report(results, out)
    _write_text(config.output_path, out.getvalue())
    return 0 if all(r.passed for r in results) else 1


def cmd_baseline(config: RunConfig, args: argparse.Namespace, as_json: bool) -> int:
    cfg = config.baseline
    if args.pt is None:
        cfg = replace(cfg, p_t=power_for_avg(config.params, cfg, config.params.p_max))
    rate, p_bar = rate_and_power(config.params, cfg)
    record = {
        "beamwidth_deg": cfg.beamwidth_deg,
        "v_max_m_s": cfg.v_max,
        "p_t": cfg.p_t,
        "f_comm": comm_fraction(config.params, cfg),
        "spectral_efficiency_bit_s_hz": rate / config.params.w_tot,
        "avg_rate_bit_s": rate,
        "avg_power": p_bar,
    }
    if as_json:
        print(json.dumps(record, indent=2))
    else:
        for key, value in record.items():
            print(f"{key}: {_fmt(value) if isinstance(value, float) else value}")
    return 0


def _make_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="flat key = value config file")
    shared.add_argument("--phi", type=float, help="speed uncertainty v_max - v_min, m/s")
    shared.add_argument("--vmax", type=float, help="worst-case speed, m/s (phi = 2*vmax)")
    shared.add_argument("--pmax", type=float, help="average power budget")
    shared.add_argument("--seed", type=int, help="master seed for randomized checks")
    shared.add_argument("--out", help="output file path (default: stdout)")
    shared.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(
        prog="beamcycle",
        description="Design and verify beam-sweeping / data-communication cycles",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("optimize", parents=[shared], help="rate-maximal cycle design")

    sweep = sub.add_parser("sweep", parents=[shared], help="grid sweep to CSV")
    sweep.add_argument("--axis", choices=("power", "speed"), help="sweep axis")
    sweep.add_argument("--values", help="comma-separated, strictly increasing grid")

    verify = sub.add_parser("verify", parents=[shared], help="run verification suites")
    verify.add_argument(
        "--perturb-closed-form",
        type=float,
        default=0.0,
        help="inject a relative error into the closed forms (self-test)",
    )
    verify.add_argument("--tuples", type=int, default=200, help="quadrature comparisons")
    verify.add_argument(
        "--trajectories", type=int, default=100_000, help="Monte Carlo trajectories per point"
    )
    verify.add_argument("--profiles", type=int, default=1000, help="random power profiles")

    baseline = sub.add_parser("baseline", parents=[shared], help="fixed-beam comparison point")
    baseline.add_argument("--beamwidth-deg", type=float, dest="beamwidth_deg")
    baseline.add_argument("--pt", type=float, help="constant transmit power")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        config, zero_power = _build_config(args)
        if args.command == "optimize":
            return cmd_optimize(config, args.json, zero_power)
        if zero_power:
            raise ValueError("p_max must be strictly positive")
        if args.command == "sweep":
            return cmd_sweep(config)
        if args.command == "verify":
            return cmd_verify(config, args)
        return cmd_baseline(config, args, args.json)
    except FeasibilityError as exc:
        print(f"error: infeasible problem: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
