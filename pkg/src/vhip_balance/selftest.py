"""Fast internal consistency checks behind the ``selftest`` CLI subcommand."""

from __future__ import annotations

import numpy as np

from .config import load_config
from .controllers import ControllerGains
from .geometry import ContactGeometry, clamp_zmp
from .models import GRAVITY, PendulumState, ReducedInput, dcm, lip_accel, vhip_accel
from .qp import SOLVED, ActiveSetSolver, QPProblem, kkt_residuals
from .simulation import run_scenario


def run() -> int:
    checks: list[tuple[str, bool]] = []

    state = PendulumState(c=[0.0, 0.0, 0.8], c_dot=[0.1, 0.0, 0.0])
    omega0 = np.sqrt(GRAVITY / 0.8)
    a_vhip = vhip_accel(state, ReducedInput(z=[0.0, 0.0, 0.0], lambda_=omega0**2))
    a_lip = lip_accel(state, np.zeros(3), omega0)
    checks.append(("VHIP on the LIP manifold matches the LIP", np.allclose(a_vhip, a_lip, atol=1e-12)))

    xi = dcm(state.c, state.c_dot, omega0)
    checks.append(("DCM round trip", np.allclose(omega0 * (xi - state.c), state.c_dot, atol=1e-12)))

    geometry = ContactGeometry.flat(0.1, 0.065)
    z = clamp_zmp(np.array([0.2, -0.3, 0.0]), geometry)
    checks.append(("ZMP corner clamp", np.allclose(z, [0.1, -0.065, 0.0])))

    problem = QPProblem(
        W=np.eye(2), A=np.array([[1.0, 1.0]]), b=np.array([2.0]),
        G=np.zeros((0, 2)), h=np.zeros(0),
    )
    solution = ActiveSetSolver().solve(problem)
    residuals = kkt_residuals(problem, solution)
    checks.append((
        "QP analytic solve",
        solution.status == SOLVED
        and np.allclose(solution.x, [1.0, 1.0], atol=1e-9)
        and max(residuals) < 1e-8,
    ))

    config = load_config("fig2", ["duration=3.0", "impulse.magnitude=1.5"])
    trajectory = run_scenario(config.scenario())
    checks.append(("fig2 small-impulse recovery", trajectory.outcome == "recovered"))

    failed = 0
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed += 0 if ok else 1
    return 0 if failed == 0 else 1
