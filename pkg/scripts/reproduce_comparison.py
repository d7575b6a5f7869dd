#!/usr/bin/env python3
"""Reproduce the standing push-recovery controller comparison.

Runs the VHIP and FIP controllers side by side on the fig2 preset for a
small, a medium, and a large lateral impulse, writes per-run trajectory
CSVs plus a JSON summary, and renders a comparison figure.

Usage:
    python3 scripts/reproduce_comparison.py [--out results/comparison]
"""

import argparse
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from vhip_balance.cli import write_trajectory_csv
from vhip_balance.config import load_config
from vhip_balance.simulation import compare_controllers


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/comparison", help="output directory")
    parser.add_argument("--magnitudes", default="1.5,4.5,5.7",
                        help="comma-separated impulse magnitudes in N.s")
    args = parser.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    magnitudes = [float(m) for m in args.magnitudes.split(",") if m.strip()]

    scenario = load_config("fig2").scenario()
    report = compare_controllers(scenario, magnitudes)
    reference = scenario.reference()

    summary = []
    fig, axes = plt.subplots(3, len(report.entries), figsize=(4 * len(report.entries), 9),
                             sharex=True, squeeze=False)
    for col, entry in enumerate(report.entries):
        for name, traj, style in (("vhip", entry.vhip, "-"), ("fip", entry.fip, "--")):
            tag = f"{entry.magnitude:g}".replace(".", "p")
            write_trajectory_csv(traj, out_dir / f"{name}_i{tag}.csv")
            axes[0][col].plot(traj.t, traj.xi[:, 2], style, label=name)
            axes[1][col].plot(traj.t, traj.omega, style, label=name)
            axes[2][col].plot(traj.t, traj.z[:, 1], style, label=name)
        summary.append({
            "magnitude": entry.magnitude,
            "vhip": entry.vhip.summary(),
            "fip": entry.fip.summary(),
            "max_zmp_difference": entry.max_zmp_difference,
        })
        axes[0][col].set_title(f"i = {entry.magnitude:g} N.s")
        axes[0][col].set_ylabel("DCM height [m]")
        axes[1][col].set_ylabel("omega [s^-1]")
        axes[2][col].set_ylabel("ZMP y [m]")
        axes[2][col].set_xlabel("t [s]")
        axes[2][col].axhline(scenario.geometry.half_extent_y, color="k", lw=0.5)
        for row in range(3):
            axes[row][col].legend(loc="best", fontsize=8)
    axes[1][0].axhline(reference.omega_d, color="k", lw=0.5)

    fig.tight_layout()
    fig.savefig(out_dir / "comparison.png", dpi=150)
    (out_dir / "comparison.json").write_text(json.dumps(summary, indent=2) + "\n")

    for line in summary:
        print(f"i = {line['magnitude']:5.2f} N.s: "
              f"vhip {line['vhip']['outcome']:9s} fip {line['fip']['outcome']:9s} "
              f"max |z_vhip - z_fip| = {line['max_zmp_difference'] * 1e3:.3f} mm")
    print(f"wrote {out_dir}/comparison.png and per-run CSVs")


if __name__ == "__main__":
    main()
