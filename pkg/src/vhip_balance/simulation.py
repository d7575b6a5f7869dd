"""Perfect closed-loop simulation: push recovery, classification, thresholds.

The plant is the point-mass VHIP integrated by RK4 with zero-order-hold
inputs over each control period. Measurement is perfect (simulator state
read directly). Impulses are instantaneous velocity jumps applied between
ticks, right before the measurement of the tick at the impulse time, so
the controller reacts on the same tick as the impact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .controllers import (
    ControlOutput,
    ControllerGains,
    Measurement,
    SaturationFlags,
    clamp_zmp,
    fip_feedback,
    lip_feedback,
    vhip_feedback,
)
from .geometry import ContactGeometry, FeasibilityLimits
from .models import GRAVITY, PendulumState, ReferenceSetpoint, Vector3, gravity_vector
from .qp import ActiveSetSolver

RECOVERED = "recovered"
FAILED = "failed"
TIMEOUT = "timeout"

CONTROLLERS = ("lip", "fip", "vhip")

# Failure classification (the source material defines failure only
# qualitatively; these cutoffs are generous).
DCM_ESCAPE_DISTANCE = 0.5  # [m] horizontal DCM distance from the support area
MIN_COM_HEIGHT = 0.05  # [m]
RECOVERY_DCM_TOL = 0.01  # [m]
RECOVERY_OMEGA_TOL = 0.01  # [s]^-1


class BracketError(ValueError):
    """Bisection bracket does not straddle the failure threshold."""


@dataclass(frozen=True)
class Impulse:
    time: float  # [s]
    direction: Vector3
    magnitude: float  # [N s]

    def __post_init__(self):
        direction = np.asarray(self.direction, dtype=float)
        norm = np.linalg.norm(direction)
        if norm < 1e-12:
            raise ValueError("impulse direction must be a nonzero vector")
        object.__setattr__(self, "direction", direction / norm)
        if self.magnitude < 0.0:
            raise ValueError(f"impulse magnitude must be non-negative, got {self.magnitude}")


@dataclass(frozen=True)
class Scenario:
    """One push-recovery experiment around a static equilibrium."""

    mass: float  # [kg]
    com_height: float  # [m]
    edge_offset: float  # [m] distance from the reference ZMP to the +y edge
    geometry: ContactGeometry
    gains: ControllerGains
    limits: FeasibilityLimits
    impulse: Impulse
    duration: float  # [s]
    controller: str = "vhip"
    substeps: int = 1  # RK4 substeps per control period
    g: float = GRAVITY

    def __post_init__(self):
        if self.controller not in CONTROLLERS:
            raise ValueError(f"unknown controller {self.controller!r}, expected one of {CONTROLLERS}")
        if self.duration <= self.impulse.time:
            raise ValueError("duration must exceed the impulse time")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if not 0.0 < self.edge_offset < 2.0 * self.geometry.half_extent_y:
            raise ValueError("edge_offset must place the reference ZMP inside the support area")

    def reference(self) -> ReferenceSetpoint:
        """Static equilibrium with the reference ZMP edge_offset from the +y edge."""
        z_local = np.array([0.0, self.geometry.half_extent_y - self.edge_offset, 0.0])
        z_d = self.geometry.to_world(z_local)
        com = z_d + self.com_height * self.geometry.normal
        return ReferenceSetpoint.static_equilibrium(com, z_d, g=self.g)


@dataclass
class Trajectory:
    """Uniformly sampled closed-loop run plus outcome and statistics."""

    t: np.ndarray
    c: np.ndarray
    c_dot: np.ndarray
    xi: np.ndarray
    omega: np.ndarray
    lambda_: np.ndarray
    z: np.ndarray
    sigma: np.ndarray
    saturation: np.ndarray  # (N, 4) bool: zmp, lambda, omega, height
    degraded: np.ndarray
    qp_solve_times: np.ndarray
    outcome: str
    peak_omega: float
    peak_xi_z_excursion: float
    final_dcm_error: float

    def summary(self) -> dict:
        return {
            "outcome": self.outcome,
            "peak_omega": self.peak_omega,
            "peak_xi_z_excursion": self.peak_xi_z_excursion,
            "final_dcm_error": self.final_dcm_error,
            "ticks": int(len(self.t)),
            "saturated_ticks": int(np.any(self.saturation, axis=1).sum()),
            "degraded_ticks": int(self.degraded.sum()),
        }


def step(
    state: PendulumState, output: ControlOutput, dt: float, substeps: int = 1, g: float = GRAVITY
) -> PendulumState:
    """RK4 integration of the VHIP dynamics with zero-order-hold inputs."""
    g_vec = gravity_vector(g)
    z, lam = output.z, output.lambda_

    def rates(y: np.ndarray) -> np.ndarray:
        c, c_dot = y[:3], y[3:]
        return np.concatenate([c_dot, lam * (c - z) + g_vec])

    y = np.concatenate([state.c, state.c_dot])
    h = dt / substeps
    for _ in range(substeps):
        k1 = rates(y)
        k2 = rates(y + 0.5 * h * k1)
        k3 = rates(y + 0.5 * h * k2)
        k4 = rates(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return PendulumState(c=y[:3], c_dot=y[3:])


def apply_impulse(
    state: PendulumState, direction: Vector3, magnitude: float, mass: float
) -> PendulumState:
    """Instantaneous velocity jump c_dot += (magnitude / mass) * direction."""
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"impulse direction must be a unit vector, norm {norm}")
    return PendulumState(c=state.c, c_dot=state.c_dot + (magnitude / mass) * direction)


def _horizontal_escape(xi: Vector3, geometry: ContactGeometry) -> float:
    """Horizontal distance from the DCM to the support rectangle."""
    local = geometry.to_local(xi)
    dx = max(abs(local[0]) - geometry.half_extent_x, 0.0)
    dy = max(abs(local[1]) - geometry.half_extent_y, 0.0)
    return float(np.hypot(dx, dy))


def run_scenario(scenario: Scenario) -> Trajectory:
    """Closed loop at the control period: measure, control, hold, integrate."""
    reference = scenario.reference()
    gains = scenario.gains
    geometry = scenario.geometry
    dt = gains.dt
    n_ticks = int(round(scenario.duration / dt))
    impulse_tick = int(round(scenario.impulse.time / dt))
    solver = ActiveSetSolver()
    b_fip = 1.0 / reference.omega_d
    warm_start: tuple[int, ...] | None = None

    state = PendulumState(c=reference.c_d.copy(), c_dot=reference.c_dot_d.copy())
    rows: list[tuple] = []
    outcome = TIMEOUT
    last_output: ControlOutput | None = None

    for k in range(n_ticks):
        if k == impulse_tick and scenario.impulse.magnitude > 0.0:
            state = apply_impulse(
                state, scenario.impulse.direction, scenario.impulse.magnitude, scenario.mass
            )
        measurement = Measurement(
            delta_c=state.c - reference.c_d,
            delta_c_dot=state.c_dot - reference.c_dot_d,
            c_dot=state.c_dot,
        )
        if scenario.controller == "vhip":
            output = vhip_feedback(
                measurement, reference, scenario.limits, gains, geometry,
                scenario.mass, solver, warm_start=warm_start,
            )
            warm_start = output.qp_active_set if not output.degraded else None
            omega = reference.omega_d + output.delta_omega
            xi = reference.xi_d + output.delta_xi
        elif scenario.controller == "fip":
            output = fip_feedback(measurement, reference, gains, geometry, b_fip)
            omega = reference.omega_d
            xi = reference.xi_d + output.delta_xi
        else:  # lip
            delta_xi = measurement.delta_c + measurement.delta_c_dot / reference.omega_d
            z_raw = reference.z_d + lip_feedback(delta_xi, gains)
            z = clamp_zmp(z_raw, geometry)
            output = ControlOutput(
                z=z,
                lambda_=reference.lambda_d,
                delta_xi=delta_xi,
                delta_omega=0.0,
                saturation=SaturationFlags(zmp=not geometry.contains_zmp(z_raw)),
            )
            omega = reference.omega_d
            xi = reference.xi_d + delta_xi

        sat = output.saturation
        rows.append((
            k * dt, state.c.copy(), state.c_dot.copy(), xi.copy(), omega, output.lambda_,
            output.z.copy(), output.delta_sigma.copy(),
            (sat.zmp, sat.lambda_, sat.omega, sat.height),
            output.degraded, output.qp_solve_time,
        ))
        last_output = output

        if not np.all(np.isfinite(state.c)) or not np.all(np.isfinite(state.c_dot)):
            outcome = FAILED
            break
        if _horizontal_escape(xi, geometry) > DCM_ESCAPE_DISTANCE:
            outcome = FAILED
            break
        if geometry.normal_coord(state.c) <= MIN_COM_HEIGHT:
            outcome = FAILED
            break

        state = step(state, output, dt, substeps=scenario.substeps, g=scenario.g)

    t, c, c_dot, xi_arr, omega_arr, lam, z, sigma, sat, degraded, solve_times = zip(*rows)
    xi_arr = np.array(xi_arr)
    omega_arr = np.array(omega_arr)
    final_dxi = float(np.linalg.norm(xi_arr[-1] - reference.xi_d))
    final_domega = abs(omega_arr[-1] - reference.omega_d)
    if outcome != FAILED and final_dxi < RECOVERY_DCM_TOL and final_domega < RECOVERY_OMEGA_TOL:
        outcome = RECOVERED
    return Trajectory(
        t=np.array(t),
        c=np.array(c),
        c_dot=np.array(c_dot),
        xi=xi_arr,
        omega=omega_arr,
        lambda_=np.array(lam),
        z=np.array(z),
        sigma=np.array(sigma),
        saturation=np.array(sat, dtype=bool),
        degraded=np.array(degraded, dtype=bool),
        qp_solve_times=np.array(solve_times),
        outcome=outcome,
        peak_omega=float(omega_arr.max()),
        peak_xi_z_excursion=float(np.max(np.abs(xi_arr[:, 2] - reference.xi_d[2]))),
        final_dcm_error=final_dxi,
    )


def find_threshold(
    scenario_template: Scenario,
    controller: str,
    bracket: tuple[float, float],
    tol: float = 0.05,
) -> float:
    """Bisect the impulse magnitude separating recovery from failure.

    Returns the largest magnitude found to recover. The bracket must
    straddle the threshold: ``lo`` recovers and ``hi`` does not.
    """
    lo, hi = bracket
    if not 0.0 <= lo < hi:
        raise BracketError(f"invalid bracket ({lo}, {hi})")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")

    def recovers(magnitude: float) -> bool:
        scenario = replace(
            scenario_template,
            controller=controller,
            impulse=replace(scenario_template.impulse, magnitude=magnitude),
        )
        return run_scenario(scenario).outcome == RECOVERED

    if not recovers(lo):
        raise BracketError(f"lower bracket {lo} N.s does not recover")
    if recovers(hi):
        raise BracketError(f"upper bracket {hi} N.s recovers; raise it")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if recovers(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class ComparisonEntry:
    magnitude: float
    vhip: Trajectory
    fip: Trajectory
    zmp_difference: np.ndarray  # per-tick norm over the common horizon
    dcm_difference: np.ndarray

    @property
    def max_zmp_difference(self) -> float:
        return float(self.zmp_difference.max())


@dataclass
class ComparisonReport:
    entries: list[ComparisonEntry] = field(default_factory=list)


def compare_controllers(scenario_template: Scenario, magnitudes: list[float]) -> ComparisonReport:
    """Run the VHIP and FIP controllers side by side per impulse magnitude."""
    report = ComparisonReport()
    for magnitude in magnitudes:
        impulse = replace(scenario_template.impulse, magnitude=magnitude)
        trajectories = {}
        for controller in ("vhip", "fip"):
            scenario = replace(scenario_template, controller=controller, impulse=impulse)
            trajectories[controller] = run_scenario(scenario)
        n = min(len(trajectories["vhip"].t), len(trajectories["fip"].t))
        zmp_diff = np.linalg.norm(trajectories["vhip"].z[:n] - trajectories["fip"].z[:n], axis=1)
        dcm_diff = np.linalg.norm(trajectories["vhip"].xi[:n] - trajectories["fip"].xi[:n], axis=1)
        report.entries.append(ComparisonEntry(
            magnitude=magnitude,
            vhip=trajectories["vhip"],
            fip=trajectories["fip"],
            zmp_difference=zmp_diff,
            dcm_difference=dcm_diff,
        ))
    return report
