"""Vertical force control: stiffness measurement and CoM admittance.

The normalized stiffness implied by the measured contact force,

    lambda = (n . f) / (m n . (c - p)),

is compared against the commanded stiffness; the error maps to a vertical
CoM acceleration offset so the CoM complies in the direction of external
vertical pushes instead of staying rigid. The admittance gain ``A_z``
carries units of meters (stiffness error in s^-2 maps to m/s^2); the
hardware-tuned value is 0.005.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ContactGeometry, DegenerateGeometryError
from .models import GRAVITY, Vector3, _as_vector3

DEFAULT_ADMITTANCE_GAIN = 0.005  # [m]


@dataclass(frozen=True)
class ForceMeasurement:
    """Net contact force, optionally corrupted by additive sensor noise."""

    f: Vector3

    def __post_init__(self):
        object.__setattr__(self, "f", _as_vector3(self.f, "f"))

    def with_noise(self, rng: np.random.Generator, std: float) -> "ForceMeasurement":
        if std < 0.0:
            raise ValueError(f"noise std must be non-negative, got {std}")
        return ForceMeasurement(self.f + rng.normal(0.0, std, size=3))


def measure_lambda(
    force: ForceMeasurement, mass: float, c: Vector3, geometry: ContactGeometry
) -> float:
    """Normalized stiffness implied by the measured normal contact force."""
    height = geometry.normal_coord(c)
    if height <= 0.0:
        raise DegenerateGeometryError(f"CoM at or below the contact plane (height {height})")
    return float(geometry.normal @ force.f) / (mass * height)


def vertical_com_admittance(lambda_d: float, lambda_measured: float, A_z: float) -> float:
    """Vertical CoM acceleration offset A_z * (lambda_d - lambda).

    A measured stiffness above the desired one (robot pushed down, normal
    force rising) yields a negative offset: the CoM complies downward.
    """
    if A_z < 0.0:
        raise ValueError(f"A_z must be non-negative, got {A_z}")
    return A_z * (lambda_d - lambda_measured)


@dataclass(frozen=True)
class VerticalComplianceLog:
    """Time series from :func:`run_vertical_compliance`."""

    t: np.ndarray
    height: np.ndarray
    lambda_measured: np.ndarray
    lambda_commanded: np.ndarray


def run_vertical_compliance(
    mass: float,
    height0: float,
    A_z: float,
    push_force: float,
    push_window: tuple[float, float],
    duration: float,
    dt: float = 0.005,
    noise_std: float = 0.0,
    seed: int = 0,
    g: float = GRAVITY,
) -> VerticalComplianceLog:
    """Closed-loop vertical admittance against a synthetic point mass.

    The plant is position-controlled and the force channel is synthetic:
    measured normal force = commanded force m * lambda_d * h, plus the
    injected external push (positive = downward push, which raises the
    ground reaction force), plus optional sensor noise. The admittance law
    shifts the tracked CoM height in response to the stiffness error.
    """
    geometry = ContactGeometry.flat(0.1, 0.1)
    rng = np.random.default_rng(seed)
    lambda_d = g / height0
    n_steps = int(round(duration / dt))
    t = np.arange(n_steps) * dt
    height = np.empty(n_steps)
    lam_meas = np.empty(n_steps)
    lam_cmd = np.empty(n_steps)
    h, h_dot = height0, 0.0
    for k in range(n_steps):
        pushing = push_window[0] <= t[k] < push_window[1]
        f_ext = push_force if pushing else 0.0
        f_z = mass * lambda_d * h + f_ext
        force = ForceMeasurement(np.array([0.0, 0.0, f_z]))
        if noise_std > 0.0:
            force = force.with_noise(rng, noise_std)
        com = np.array([0.0, 0.0, h])
        lam = measure_lambda(force, mass, com, geometry)
        h_ddot = vertical_com_admittance(lambda_d, lam, A_z)
        height[k] = h
        lam_meas[k] = lam
        lam_cmd[k] = lambda_d
        h_dot += h_ddot * dt
        h += h_dot * dt
    return VerticalComplianceLog(t, height, lam_meas, lam_cmd)
