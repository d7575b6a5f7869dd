#!/usr/bin/env python3
"""Bisect the push-recovery failure threshold of each controller.

Uses the fig2 preset and a lateral impulse. The threshold is the largest
impulse magnitude (in N.s) from which the controller still returns to the
reference equilibrium.

Usage:
    python3 scripts/sweep_thresholds.py [--tol 0.02]
"""

import argparse

from vhip_balance.config import load_config
from vhip_balance.simulation import find_threshold

BRACKETS = {
    "lip": (0.5, 6.0),
    "fip": (4.0, 7.0),
    "vhip": (4.0, 8.0),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tol", type=float, default=0.02,
                        help="bisection tolerance in N.s")
    parser.add_argument("--controllers", default="fip,vhip",
                        help="comma-separated controllers to sweep")
    args = parser.parse_args()

    scenario = load_config("fig2").scenario()
    thresholds = {}
    for controller in args.controllers.split(","):
        controller = controller.strip()
        thr = find_threshold(scenario, controller, BRACKETS[controller], tol=args.tol)
        thresholds[controller] = thr
        print(f"{controller:5s} threshold: {thr:.3f} N.s")
    if "fip" in thresholds and "vhip" in thresholds:
        gap = thresholds["vhip"] - thresholds["fip"]
        print(f"vhip - fip gap: {gap:.3f} N.s")


if __name__ == "__main__":
    main()
