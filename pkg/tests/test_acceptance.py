"""End-to-end acceptance checks for the push-recovery comparison setup.

Each test prints a single PASS/FAIL line (visible with ``pytest -s``) and
asserts the same condition, so the suite doubles as a human-readable report.
"""

import time

import numpy as np
from dataclasses import replace

from helpers import enumerate_qp, random_qp
from vhip_balance.admittance import run_vertical_compliance
from vhip_balance.config import load_config
from vhip_balance.controllers import (
    ControllerGains,
    Measurement,
    closed_loop_rates,
    vhip_feedback,
)
from vhip_balance.geometry import ContactGeometry, FeasibilityLimits
from vhip_balance.models import PendulumState, ReferenceSetpoint
from vhip_balance.qp import SOLVED, ActiveSetSolver, objective_value
from vhip_balance.simulation import (
    RECOVERED,
    compare_controllers,
    find_threshold,
    run_scenario,
    step,
)


def report(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"{name}: {detail}"


def fig2_scenario(**overrides):
    scenario = load_config("fig2").scenario()
    if overrides:
        scenario = replace(scenario, **overrides)
    return scenario


def with_magnitude(scenario, magnitude):
    return replace(scenario, impulse=replace(scenario.impulse, magnitude=magnitude))


def test_01_small_push_controllers_coincide():
    t0 = time.perf_counter()
    scenario = fig2_scenario(duration=5.0)
    report_data = compare_controllers(scenario, [1.5])
    entry = report_data.entries[0]
    omega_d = scenario.reference().omega_d
    max_zmp = entry.max_zmp_difference
    max_domega = float(np.max(np.abs(entry.vhip.omega - omega_d)))
    elapsed = time.perf_counter() - t0
    ok = max_zmp < 1e-3 and max_domega < 1e-6 and elapsed < 5.0
    report(
        "small-push coincidence",
        ok,
        f"max ZMP diff {max_zmp * 1e3:.4f} mm (< 1 mm), "
        f"max |d omega| {max_domega:.2e} (< 1e-6), runtime {elapsed:.2f} s (< 5 s)",
    )


def test_02_medium_push_omega_jump():
    traj = run_scenario(with_magnitude(fig2_scenario(), 4.5))
    ok = traj.outcome == RECOVERED and 3.9 <= traj.peak_omega <= 4.5
    report(
        "medium-push omega jump",
        ok,
        f"peak omega {traj.peak_omega:.3f} in [3.9, 4.5], outcome {traj.outcome}",
    )


def test_03_medium_push_height_strategy():
    traj = run_scenario(with_magnitude(fig2_scenario(), 4.5))
    exc = traj.peak_xi_z_excursion
    ok = 0.10 <= exc <= 0.20
    report(
        "medium-push height use",
        ok,
        f"peak DCM height excursion {exc:.3f} m in [0.10, 0.20]",
    )


def test_04_failure_threshold_separation():
    t0 = time.perf_counter()
    scenario = fig2_scenario()
    thr_fip = find_threshold(scenario, "fip", (4.0, 7.0), tol=0.02)
    thr_vhip = find_threshold(scenario, "vhip", (4.0, 8.0), tol=0.02)
    elapsed = time.perf_counter() - t0
    gap = thr_vhip - thr_fip
    ok = (4.7 <= thr_fip <= 5.7 and 5.5 <= thr_vhip <= 6.5
          and gap >= 0.4 and elapsed < 120.0)
    report(
        "failure threshold separation",
        ok,
        f"fip {thr_fip:.3f} in [4.7, 5.7], vhip {thr_vhip:.3f} in [5.5, 6.5], "
        f"gap {gap:.3f} (>= 0.4), runtime {elapsed:.1f} s (< 120 s)",
    )


def test_05_height_ceiling_respected():
    traj = run_scenario(with_magnitude(fig2_scenario(), 5.7))
    max_xi_z = float(traj.xi[:, 2].max())
    height_ticks = int(traj.saturation[:, 3].sum())
    ok = (traj.outcome == RECOVERED and max_xi_z <= 1.0 + 1e-6
          and height_ticks >= 1)
    report(
        "height ceiling",
        ok,
        f"max DCM height {max_xi_z:.4f} m (<= 1.0 + 1e-6), "
        f"height saturation in {height_ticks} ticks (>= 1), outcome {traj.outcome}",
    )


def test_06_qp_latency():
    times = []
    for magnitude in (1.5, 4.5, 5.7):
        traj = run_scenario(with_magnitude(fig2_scenario(), magnitude))
        times.append(traj.qp_solve_times)
    median = float(np.median(np.concatenate(times)))
    ok = median < 1e-3
    report("per-tick QP latency", ok, f"median solve {median * 1e3:.3f} ms (< 1 ms)")


def test_07_qp_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    solver = ActiveSetSolver()
    worst = 0.0
    solved = infeasible = 0
    for k in range(1000):
        bias = 1.0 if k % 5 == 0 else 0.0
        problem = random_qp(rng, n=10, p=7, m=10, infeasible_bias=bias)
        sol = solver.solve(problem)
        status, _, best_obj = enumerate_qp(problem)
        assert sol.status == status, f"problem {k}: {sol.status} vs oracle {status}"
        if status == SOLVED:
            solved += 1
            worst = max(worst, abs(objective_value(problem, sol.x) - best_obj))
        else:
            infeasible += 1
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and solved + infeasible == 1000 and elapsed < 60.0
    report(
        "QP oracle equivalence",
        ok,
        f"1000 problems ({solved} solved, {infeasible} infeasible), "
        f"worst objective gap {worst:.2e} (< 1e-6), runtime {elapsed:.1f} s (< 60 s)",
    )


def test_08_pole_placement_decay_rates():
    # Tall pendulum and a fine control period keep both the cost
    # regularization bias and the zero-order-hold bias well under budget.
    reference = ReferenceSetpoint.static_equilibrium([0.0, 0.0, 2.0], np.zeros(3))
    geometry = ContactGeometry.flat(0.5, 0.5)
    limits = FeasibilityLimits(f_min=1.0, f_max=9000.0, h_min=0.1, h_max=5.0)
    gains = ControllerGains(dt=2e-4)
    solver = ActiveSetSolver()
    state = PendulumState(c=reference.c_d + [0.01, 0.005, 0.02], c_dot=np.zeros(3))
    n = int(round(1.0 / gains.dt))
    t = np.arange(n) * gains.dt
    delta_xi = np.empty((n, 3))
    delta_omega = np.empty(n)
    warm = None
    for k in range(n):
        m = Measurement(delta_c=state.c - reference.c_d,
                        delta_c_dot=state.c_dot - reference.c_dot_d,
                        c_dot=state.c_dot)
        out = vhip_feedback(m, reference, limits, gains, geometry, 38.0, solver,
                            warm_start=warm)
        assert not out.degraded and not out.saturation.any()
        warm = out.qp_active_set
        delta_xi[k] = out.delta_xi
        delta_omega[k] = out.delta_omega
        state = step(state, out, gains.dt)

    spatial_rate, frequency_rate = closed_loop_rates(reference, gains)

    def fitted_rate(values):
        mask = values > 1e-8
        return np.polyfit(t[mask], np.log(values[mask]), 1)[0]

    rate_xy = fitted_rate(np.linalg.norm(delta_xi[:, :2], axis=1))
    rate_om = fitted_rate(np.abs(delta_omega))
    err_xy = abs(rate_xy / spatial_rate - 1.0)
    err_om = abs(rate_om / frequency_rate - 1.0)
    ok = err_xy < 0.02 and err_om < 0.02
    report(
        "pole placement decay",
        ok,
        f"DCM rate {rate_xy:.3f} vs {spatial_rate:.3f} ({err_xy * 100:.2f}% < 2%), "
        f"omega rate {rate_om:.3f} vs {frequency_rate:.3f} ({err_om * 100:.2f}% < 2%)",
    )


def test_09_omega_viability_barrier():
    # Below omega_min = sqrt(lambda_min) with lambda pinned at lambda_min,
    # omega' = omega^2 - lambda_min is strictly negative, so omega can only
    # fall further: the band [omega_min, omega_max] is never re-entered.
    lam_min = 4.0
    om_min = np.sqrt(lam_min)
    dt = 1e-3
    worst = -np.inf
    for om0 in np.linspace(0.05, om_min - 1e-4, 40):
        omega = om0
        for _ in range(3000):
            omega += (omega**2 - lam_min) * dt
            worst = max(worst, omega)
            if omega <= 0.0:
                break
    ok = worst < om_min
    report(
        "omega viability barrier",
        ok,
        f"max omega after crossing {worst:.4f} (< omega_min {om_min:.4f})",
    )


def test_10_vertical_admittance_direction():
    log = run_vertical_compliance(mass=38.0, height0=0.8, A_z=0.005,
                                  push_force=80.0, push_window=(1.0, 2.0),
                                  duration=3.0)
    during = (log.t >= 1.0) & (log.t < 2.0)
    complies = (np.all(log.lambda_measured[during] > log.lambda_commanded[during])
                and np.all(np.diff(log.height[during]) <= 0.0)
                and log.height[during][-1] < log.height[during][0])
    stiff_log = run_vertical_compliance(mass=38.0, height0=0.8, A_z=0.0,
                                        push_force=80.0, push_window=(1.0, 2.0),
                                        duration=3.0)
    stiff = bool(np.all(stiff_log.height == 0.8))
    ok = complies and stiff
    report(
        "vertical admittance direction",
        ok,
        f"downward compliance {complies} (dip "
        f"{(0.8 - log.height.min()) * 1e3:.1f} mm), zero-gain exactly stiff {stiff}",
    )
