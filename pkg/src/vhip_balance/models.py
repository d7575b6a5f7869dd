"""Reduced point-mass pendulum models and their divergent components of motion.

Three reduced models of bipedal balance share the same point-mass plant:

- VHIP: variable-height inverted pendulum, inputs (lambda, z)
- LIP: linear inverted pendulum, input z with stiffness pinned to omega_0^2
- FIP: floating-base inverted pendulum, input e (eCMP) with fixed timescale b

All quantities are SI: positions in meters, velocities in m/s, the
normalized stiffness lambda in s^-2 and natural frequencies omega in s^-1.
The world frame is z-up and the gravity vector is (0, 0, -g).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

GRAVITY = 9.81  # [m] / [s]^2

Vector3 = NDArray[np.float64]


def gravity_vector(g: float = GRAVITY) -> Vector3:
    """Gravity acceleration vector in the z-up world frame."""
    return np.array([0.0, 0.0, -g])


def _as_vector3(x, name: str) -> Vector3:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite components: {v}")
    return v


@dataclass(frozen=True)
class PendulumState:
    """Point-mass plant state: CoM position and velocity."""

    c: Vector3
    c_dot: Vector3

    def __post_init__(self):
        object.__setattr__(self, "c", _as_vector3(self.c, "c"))
        object.__setattr__(self, "c_dot", _as_vector3(self.c_dot, "c_dot"))


@dataclass(frozen=True)
class ReducedInput:
    """VHIP input pair: ZMP position on the contact plane and stiffness."""

    z: Vector3
    lambda_: float

    def __post_init__(self):
        object.__setattr__(self, "z", _as_vector3(self.z, "z"))
        if not np.isfinite(self.lambda_) or self.lambda_ <= 0.0:
            raise ValueError(f"lambda must be positive and finite, got {self.lambda_}")


@dataclass(frozen=True)
class DCMState:
    """Four-dimensional divergent component of motion: (xi, omega)."""

    xi: Vector3
    omega: float

    def __post_init__(self):
        object.__setattr__(self, "xi", _as_vector3(self.xi, "xi"))
        if not np.isfinite(self.omega) or self.omega <= 0.0:
            raise ValueError(f"omega must be positive and finite, got {self.omega}")


@dataclass(frozen=True)
class ReferenceSetpoint:
    """Consistent reduced-model reference tracked by the controllers.

    The fields satisfy the reduced-model equations: ``c_dot_d = omega_d *
    (xi_d - c_d)``, ``lambda_d > 0`` and ``v_d = z_d - g_vec / lambda_d``.
    ``v_d`` is the virtual repellent point of the reference.
    """

    c_d: Vector3
    c_dot_d: Vector3
    c_ddot_d: Vector3
    xi_d: Vector3
    omega_d: float
    lambda_d: float
    z_d: Vector3
    v_d: Vector3
    g: float = GRAVITY

    def __post_init__(self):
        for name in ("c_d", "c_dot_d", "c_ddot_d", "xi_d", "z_d", "v_d"):
            object.__setattr__(self, name, _as_vector3(getattr(self, name), name))
        if self.lambda_d <= 0.0:
            raise ValueError(f"lambda_d must be positive, got {self.lambda_d}")
        if self.omega_d <= 0.0:
            raise ValueError(f"omega_d must be positive, got {self.omega_d}")
        if not np.allclose(self.c_dot_d, self.omega_d * (self.xi_d - self.c_d), atol=1e-9):
            raise ValueError("inconsistent reference: c_dot_d != omega_d * (xi_d - c_d)")
        if not np.allclose(self.v_d, self.z_d - gravity_vector(self.g) / self.lambda_d, atol=1e-9):
            raise ValueError("inconsistent reference: v_d != z_d - g_vec / lambda_d")

    @staticmethod
    def static_equilibrium(com: Vector3, z_d: Vector3, g: float = GRAVITY) -> "ReferenceSetpoint":
        """Static reference with the CoM hovering above the desired ZMP.

        At equilibrium ``lambda_d * (c_d - z_d) = -g_vec``, so the ZMP must
        lie directly below the CoM and ``lambda_d = g / (c_z - z_z)``.
        """
        com = _as_vector3(com, "com")
        z_d = _as_vector3(z_d, "z_d")
        height = com[2] - z_d[2]
        if height <= 0.0:
            raise ValueError(f"CoM must be above the ZMP, got height {height}")
        if abs(com[0] - z_d[0]) > 1e-9 or abs(com[1] - z_d[1]) > 1e-9:
            raise ValueError("static equilibrium requires the ZMP directly below the CoM")
        lambda_d = g / height
        return ReferenceSetpoint(
            c_d=com,
            c_dot_d=np.zeros(3),
            c_ddot_d=np.zeros(3),
            xi_d=com,
            omega_d=np.sqrt(lambda_d),
            lambda_d=lambda_d,
            z_d=z_d,
            v_d=z_d - gravity_vector(g) / lambda_d,
            g=g,
        )


def vhip_accel(state: PendulumState, inp: ReducedInput, g: float = GRAVITY) -> Vector3:
    """CoM acceleration of the VHIP: lambda * (c - z) + g_vec."""
    return inp.lambda_ * (state.c - inp.z) + gravity_vector(g)


def lip_accel(state: PendulumState, z: Vector3, omega0: float, g: float = GRAVITY) -> Vector3:
    """CoM acceleration of the LIP: omega_0^2 * (c - z) + g_vec."""
    if omega0 <= 0.0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    z = _as_vector3(z, "z")
    return omega0**2 * (state.c - z) + gravity_vector(g)


def fip_accel(state: PendulumState, e: Vector3, b: float, g: float = GRAVITY) -> Vector3:
    """CoM acceleration of the FIP: (c - e) / b^2 + g_vec."""
    if b <= 0.0:
        raise ValueError(f"b must be positive, got {b}")
    e = _as_vector3(e, "e")
    return (state.c - e) / b**2 + gravity_vector(g)


def dcm(c: Vector3, c_dot: Vector3, omega: float) -> Vector3:
    """Spatial DCM xi = c + c_dot / omega.

    Covers all three models: omega = omega_0 for the LIP, omega = 1 / b for
    the FIP, and a time-varying omega for the VHIP.
    """
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    return _as_vector3(c, "c") + _as_vector3(c_dot, "c_dot") / omega


def riccati_rate(omega: float, lambda_: float) -> float:
    """Time derivative of the VHIP natural frequency: omega^2 - lambda."""
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    return omega**2 - lambda_


def dcm_rates(
    xi: Vector3, c: Vector3, omega: float, inp: ReducedInput, g: float = GRAVITY
) -> tuple[Vector3, Vector3]:
    """First-order decoupled rates of the VHIP.

    The DCM is repelled by the ZMP while the CoM is attracted to the DCM:

        xi_dot = (lambda / omega) * (xi - z) + g_vec / omega
        c_dot  = omega * (xi - c)
    """
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    xi = _as_vector3(xi, "xi")
    c = _as_vector3(c, "c")
    xi_dot = (inp.lambda_ / omega) * (xi - inp.z) + gravity_vector(g) / omega
    c_dot = omega * (xi - c)
    return xi_dot, c_dot
