"""Command-line front end: scenario runs, threshold sweeps, comparisons.

Exit code contract: 0 when the scenario recovered (or the command
succeeded), 2 when the pendulum failed to recover, 1 on usage or
configuration errors. This makes threshold searches scriptable.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .simulation import (
    RECOVERED,
    BracketError,
    Trajectory,
    compare_controllers,
    run_scenario,
)

TRAJECTORY_COLUMNS = (
    "t",
    "c_x", "c_y", "c_z",
    "cd_x", "cd_y", "cd_z",
    "xi_x", "xi_y", "xi_z",
    "omega", "lambda",
    "z_x", "z_y", "z_z",
    "sigma_x", "sigma_y", "sigma_z",
    "sat_zmp", "sat_lambda", "sat_omega", "sat_height",
)


def trajectory_table(trajectory: Trajectory) -> np.ndarray:
    return np.column_stack([
        trajectory.t,
        trajectory.c,
        trajectory.c_dot,
        trajectory.xi,
        trajectory.omega,
        trajectory.lambda_,
        trajectory.z,
        trajectory.sigma,
        trajectory.saturation.astype(int),
    ])


def write_trajectory_csv(trajectory: Trajectory, path: Path) -> None:
    table = trajectory_table(trajectory)
    header = ",".join(TRAJECTORY_COLUMNS)
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt="%.12g")


def write_summary_json(summary: dict, path: Path) -> None:
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="config file path or preset name (e.g. fig2)")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override a config entry, dotted keys (e.g. gains.k_p=3)",
    )
    parser.add_argument("--output", help="output path (overrides the config)")
    parser.add_argument("--seed", type=int, help="random seed (overrides the config)")
    parser.add_argument(
        "--dump-config", action="store_true",
        help="print the effective configuration and exit",
    )


def _load(args) -> RunConfig:
    overrides = list(args.overrides)
    if args.output is not None:
        overrides.append(f"output={args.output}")
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    return load_config(args.config, overrides)


def cmd_simulate(args) -> int:
    config = _load(args)
    if args.dump_config:
        print(config.dump(), end="")
        return 0
    trajectory = run_scenario(config.scenario())
    summary = trajectory.summary()
    out = config.output
    if out:
        path = Path(out)
        write_trajectory_csv(trajectory, path)
        write_summary_json(summary, path.with_suffix(".summary.json"))
    print(f"outcome: {summary['outcome']}")
    print(f"peak omega: {summary['peak_omega']:.4f} s^-1")
    print(f"peak DCM height excursion: {summary['peak_xi_z_excursion']:.4f} m")
    print(f"final DCM error: {summary['final_dcm_error']:.6f} m")
    return 0 if trajectory.outcome == RECOVERED else 2


def cmd_sweep(args) -> int:
    config = _load(args)
    if args.dump_config:
        print(config.dump(), end="")
        return 0
    scenario = config.scenario()
    lo, hi = args.bracket
    trace: list[dict] = []

    # Re-run the bisection with a trace (find_threshold stays the library API).
    def recovers(magnitude: float) -> bool:
        s = replace(
            scenario,
            controller=args.controller,
            impulse=replace(scenario.impulse, magnitude=magnitude),
        )
        outcome = run_scenario(s).outcome
        trace.append({"magnitude": magnitude, "outcome": outcome})
        print(f"  i = {magnitude:8.4f} N.s -> {outcome}")
        return outcome == RECOVERED

    try:
        if not 0.0 <= lo < hi:
            raise BracketError(f"invalid bracket ({lo}, {hi})")
        if not recovers(lo):
            raise BracketError(f"lower bracket {lo} N.s does not recover")
        if recovers(hi):
            raise BracketError(f"upper bracket {hi} N.s recovers; raise it")
        while hi - lo > args.tol:
            mid = 0.5 * (lo + hi)
            if recovers(mid):
                lo = mid
            else:
                hi = mid
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"threshold: {lo:.4f} N.s ({args.controller})")
    if config.output:
        write_summary_json(
            {"controller": args.controller, "threshold": lo, "tol": args.tol, "trace": trace},
            Path(config.output),
        )
    return 0


def cmd_compare(args) -> int:
    config = _load(args)
    if args.dump_config:
        print(config.dump(), end="")
        return 0
    magnitudes = [float(m) for m in args.magnitudes.split(",") if m.strip()]
    if not magnitudes:
        print("error: empty magnitude list", file=sys.stderr)
        return 1
    report = compare_controllers(config.scenario(), magnitudes)
    out_dir = Path(config.output) if config.output else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    summary = []
    for entry in report.entries:
        line = {
            "magnitude": entry.magnitude,
            "vhip": entry.vhip.summary(),
            "fip": entry.fip.summary(),
            "max_zmp_difference": entry.max_zmp_difference,
            "max_dcm_difference": float(entry.dcm_difference.max()),
        }
        summary.append(line)
        print(
            f"i = {entry.magnitude:5.2f} N.s: vhip {entry.vhip.outcome:9s} "
            f"fip {entry.fip.outcome:9s} max |z_vhip - z_fip| = "
            f"{entry.max_zmp_difference * 1e3:.3f} mm"
        )
        if out_dir:
            tag = f"{entry.magnitude:g}".replace(".", "p")
            write_trajectory_csv(entry.vhip, out_dir / f"vhip_i{tag}.csv")
            write_trajectory_csv(entry.fip, out_dir / f"fip_i{tag}.csv")
    if out_dir:
        write_summary_json({"comparisons": summary}, out_dir / "comparison.json")
    return 0


def cmd_selftest(args) -> int:
    """Fast internal consistency checks (a smoke-test subset of the test suite)."""
    from . import selftest

    return selftest.run()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vhip-balance",
        description="Variable-height inverted pendulum balance simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scenario and write its trajectory")
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="bisect the failure threshold of a controller")
    _add_common(p_sweep)
    p_sweep.add_argument("--controller", choices=["lip", "fip", "vhip"], default="vhip")
    p_sweep.add_argument(
        "--bracket", nargs=2, type=float, default=[0.0, 20.0], metavar=("LO", "HI"),
        help="impulse bracket in N.s (LO must recover, HI must fail)",
    )
    p_sweep.add_argument("--tol", type=float, default=0.05, help="bisection tolerance in N.s")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare", help="run VHIP and FIP side by side")
    _add_common(p_cmp)
    p_cmp.add_argument(
        "--magnitudes", default="1.5,4.5,5.7",
        help="comma-separated impulse magnitudes in N.s",
    )
    p_cmp.set_defaults(func=cmd_compare)

    p_self = sub.add_parser("selftest", help="run fast internal consistency checks")
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
