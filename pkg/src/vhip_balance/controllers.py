"""Balance feedback laws for the reduced pendulum models.

Three controllers share the same interface: given a CoM tracking error and
a consistent reference, command a ZMP and a normalized stiffness.

- LIP: proportional DCM feedback, dz = k_p * dxi, stiffness pinned.
- FIP (DCM-eCMP): proportional feedback of the 3D DCM at the eCMP, with
  ray projection back to the support area when the eCMP leaves it.
- VHIP: best-effort pole placement of the 4D DCM (xi, omega), solved as a
  10-variable QP under input feasibility and state viability constraints.

The VHIP QP variables are X = [dxi(3), domega, dz_bar(2), dlambda,
dsigma(3)] where dsigma absorbs pole-placement violations; horizontal
violations carry the highest cost, vertical ones a 1e-3 weight, everything
else an epsilon regularization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from time import perf_counter

import numpy as np

from .geometry import (
    ContactGeometry,
    FeasibilityLimits,
    clamp_zmp,
    ecmp_to_zmp,
    lambda_bounds,
    omega_bounds,
    ray_zmp_intersection,
    zmp_halfspaces,
)
from .models import ReferenceSetpoint, Vector3, gravity_vector
from .qp import SOLVED, ActiveSetSolver, QPProblem

EPSILON_WEIGHT = 1e-6  # << 1e-3, keeps the QP cost positive-definite
VERTICAL_SIGMA_WEIGHT = 1e-3

# Inequality row layout of the VHIP QP (rectangle support area).
ZMP_ROWS = slice(0, 4)
LAMBDA_ROWS = slice(4, 6)
OMEGA_ROWS = slice(6, 8)
HEIGHT_ROWS = slice(8, 10)


@dataclass(frozen=True)
class ControllerGains:
    """Shared feedback parameters.

    ``k_p`` must exceed 1 so the normalized closed-loop pole 1 - k_p is
    stable; ``kappa`` damps sliding on the DCM height constraint.
    """

    k_p: float = 3.0
    kappa: float = 0.5
    dt: float = 0.005  # [s]

    def __post_init__(self):
        if self.k_p <= 1.0:
            raise ValueError(f"k_p must be > 1 for a stable closed loop, got {self.k_p}")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError(f"kappa must be in [0, 1], got {self.kappa}")
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")


@dataclass(frozen=True)
class Measurement:
    """Tracking errors and measured CoM velocity, all in the world frame."""

    delta_c: Vector3
    delta_c_dot: Vector3
    c_dot: Vector3


@dataclass(frozen=True)
class SaturationFlags:
    zmp: bool = False
    lambda_: bool = False
    omega: bool = False
    height: bool = False

    def any(self) -> bool:
        return self.zmp or self.lambda_ or self.omega or self.height


@dataclass(frozen=True)
class ControlOutput:
    """Commanded (z, lambda) plus controller diagnostics."""

    z: Vector3
    lambda_: float
    delta_xi: Vector3
    delta_omega: float
    delta_sigma: Vector3 = field(default_factory=lambda: np.zeros(3))
    saturation: SaturationFlags = field(default_factory=SaturationFlags)
    degraded: bool = False
    qp_active_set: tuple[int, ...] = ()
    qp_solve_time: float = 0.0  # [s]


def lip_feedback(delta_xi: Vector3, gains: ControllerGains) -> Vector3:
    """Proportional DCM feedback: dz = k_p * dxi.

    On flat ground the LIP's DCM error has no vertical component, so the
    returned offset stays on the contact plane.
    """
    return gains.k_p * np.asarray(delta_xi, dtype=float)


def closed_loop_rates(reference: ReferenceSetpoint, gains: ControllerGains) -> tuple[float, float]:
    """Assigned closed-loop decay rates of the 4D DCM error.

    Returns the spatial rate (1 - k_p) * lambda_d / omega_d and the
    frequency rate (1 - k_p) * omega_d, both negative for k_p > 1.
    """
    spatial = (1.0 - gains.k_p) * reference.lambda_d / reference.omega_d
    frequency = (1.0 - gains.k_p) * reference.omega_d
    return spatial, frequency


def reference_ecmp(reference: ReferenceSetpoint, b: float) -> Vector3:
    """eCMP matching the reference acceleration: e_d = c_d - b^2 (c_ddot_d - g_vec)."""
    return reference.c_d - b**2 * (reference.c_ddot_d - gravity_vector(reference.g))


def fip_feedback(
    measurement: Measurement,
    reference: ReferenceSetpoint,
    gains: ControllerGains,
    geometry: ContactGeometry,
    b: float,
) -> ControlOutput:
    """DCM-eCMP proportional feedback with projection to the support area."""
    if b <= 0.0:
        raise ValueError(f"b must be positive, got {b}")
    delta_xi = measurement.delta_c + b * measurement.delta_c_dot
    e = reference_ecmp(reference, b) + gains.k_p * delta_xi
    c = reference.c_d + measurement.delta_c
    z_raw = ray_zmp_intersection(c, e, geometry)
    z, lambda_ = ecmp_to_zmp(c, e, b, geometry)
    saturated = not geometry.contains_zmp(z_raw)
    return ControlOutput(
        z=z,
        lambda_=lambda_,
        delta_xi=delta_xi,
        delta_omega=0.0,
        saturation=SaturationFlags(zmp=saturated),
    )


def build_vhip_qp(
    measurement: Measurement,
    reference: ReferenceSetpoint,
    limits: FeasibilityLimits,
    gains: ControllerGains,
    geometry: ContactGeometry,
    mass: float,
) -> QPProblem:
    """Assemble the best-effort pole placement QP for one control tick.

    Equality rows (7):
      1-3: pole placement with slack,
           -k_p dxi + (xi_d - v_d)/omega_d domega + R_bar dz_bar
           + (z_d - xi_d)/lambda_d dlambda + dsigma = 0
      4-6: measurement split, dxi + (c_dot/omega_d^2) domega = dc + dc_dot/omega_d
        7: stiffness law, omega_d (1 + k_p) domega - dlambda = 0

    Inequality rows: 4 ZMP (support rectangle), 2 on lambda, 2 on omega,
    2 on the one-step-ahead DCM height.
    """
    k_p = gains.k_p
    omega_d = reference.omega_d
    lambda_d = reference.lambda_d
    R_bar = geometry.tangent

    A = np.zeros((7, 10))
    A[0:3, 0:3] = -k_p * np.eye(3)
    A[0:3, 3] = (reference.xi_d - reference.v_d) / omega_d
    A[0:3, 4:6] = R_bar
    A[0:3, 6] = (reference.z_d - reference.xi_d) / lambda_d
    A[0:3, 7:10] = np.eye(3)
    A[3:6, 0:3] = np.eye(3)
    A[3:6, 3] = measurement.c_dot / omega_d**2
    A[6, 3] = omega_d * (1.0 + k_p)
    A[6, 6] = -1.0
    b = np.concatenate([
        np.zeros(3),
        measurement.delta_c + measurement.delta_c_dot / omega_d,
        np.zeros(1),
    ])

    c = reference.c_d + measurement.delta_c
    lam_min, lam_max = lambda_bounds(limits, mass, c, geometry)
    om_min, om_max = omega_bounds(lam_min, lam_max)
    z_bar_ref = geometry.to_local(reference.z_d)[:2]
    C, d = zmp_halfspaces(geometry, z_bar_ref)

    G = np.zeros((10, 10))
    h = np.zeros(10)
    G[ZMP_ROWS, 4:6] = C
    h[ZMP_ROWS] = d
    G[4, 6] = +1.0
    G[5, 6] = -1.0
    h[4:6] = [lam_max - lambda_d, lambda_d - lam_min]
    G[6, 3] = +1.0
    G[7, 3] = -1.0
    h[6:8] = [om_max - omega_d, omega_d - om_min]
    # One-step-ahead DCM height, with sliding damped by kappa.
    g_sigma = (1.0 + gains.kappa) * gains.dt * lambda_d / omega_d
    g_xi = 1.0 + g_sigma * (1.0 - k_p)
    xi_z_d = reference.xi_d[2]
    G[8, 2] = +g_xi
    G[8, 9] = +g_sigma
    G[9, 2] = -g_xi
    G[9, 9] = -g_sigma
    h[8:10] = [limits.h_max - xi_z_d, xi_z_d - limits.h_min]

    W = np.diag([EPSILON_WEIGHT] * 7 + [1.0, 1.0, VERTICAL_SIGMA_WEIGHT])
    return QPProblem(W=W, A=A, b=b, G=G, h=h)


def vhip_feedback(
    measurement: Measurement,
    reference: ReferenceSetpoint,
    limits: FeasibilityLimits,
    gains: ControllerGains,
    geometry: ContactGeometry,
    mass: float,
    solver: ActiveSetSolver,
    warm_start: tuple[int, ...] | None = None,
) -> ControlOutput:
    """Best-effort pole placement of the 4D DCM via the per-tick QP.

    Falls back to the clamped LIP law (degraded mode) if the QP cannot be
    solved.
    """
    problem = build_vhip_qp(measurement, reference, limits, gains, geometry, mass)
    t0 = perf_counter()
    solution = solver.solve(problem, warm_start=warm_start)
    solve_time = perf_counter() - t0
    if solution.status != SOLVED:
        delta_xi_m = measurement.delta_c + measurement.delta_c_dot / reference.omega_d
        z = clamp_zmp(reference.z_d + gains.k_p * delta_xi_m, geometry)
        return ControlOutput(
            z=z,
            lambda_=reference.lambda_d,
            delta_xi=delta_xi_m,
            delta_omega=0.0,
            saturation=SaturationFlags(zmp=True),
            degraded=True,
            qp_solve_time=solve_time,
        )
    X = solution.x
    delta_z_bar = X[4:6]
    z = reference.z_d + geometry.tangent @ delta_z_bar
    active = set(solution.active_set)
    flags = SaturationFlags(
        zmp=bool(active & set(range(10)[ZMP_ROWS])),
        lambda_=bool(active & set(range(10)[LAMBDA_ROWS])),
        omega=bool(active & set(range(10)[OMEGA_ROWS])),
        height=bool(active & set(range(10)[HEIGHT_ROWS])),
    )
    return ControlOutput(
        z=z,
        lambda_=reference.lambda_d + float(X[6]),
        delta_xi=X[0:3].copy(),
        delta_omega=float(X[3]),
        delta_sigma=X[7:10].copy(),
        saturation=flags,
        qp_active_set=solution.active_set,
        qp_solve_time=solve_time,
    )
