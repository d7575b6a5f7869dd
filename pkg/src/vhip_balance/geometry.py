"""Contact geometry: ZMP frame, support rectangle, and feasibility bounds.

The ZMP frame has origin ``p`` on the contact surface and rotation ``R``
from local to world coordinates. Its third column is the contact normal.
The support area is an axis-aligned rectangle in this frame with
half-extents ``(half_extent_x, half_extent_y)``. The half-space interface
(C, d) is the extension point for general support polygons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .models import GRAVITY, Vector3, _as_vector3


class DegenerateGeometryError(ValueError):
    """CoM at or below the contact plane, or ray parallel to it."""


@dataclass(frozen=True)
class ContactGeometry:
    """ZMP frame and support rectangle of a single flat contact."""

    p: Vector3
    R: NDArray[np.float64]
    half_extent_x: float
    half_extent_y: float

    def __post_init__(self):
        object.__setattr__(self, "p", _as_vector3(self.p, "p"))
        R = np.asarray(self.R, dtype=float)
        if R.shape != (3, 3):
            raise ValueError(f"R must be 3x3, got shape {R.shape}")
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-9):
            raise ValueError("R is not orthonormal")
        if np.linalg.det(R) < 0.0:
            raise ValueError("R must be a proper rotation (det = +1)")
        object.__setattr__(self, "R", R)
        if self.half_extent_x <= 0.0 or self.half_extent_y <= 0.0:
            raise ValueError("support rectangle half-extents must be positive")

    @staticmethod
    def flat(
        half_extent_x: float, half_extent_y: float, p: Vector3 | None = None
    ) -> "ContactGeometry":
        """Horizontal contact at the world origin (or at ``p``)."""
        origin = np.zeros(3) if p is None else p
        return ContactGeometry(origin, np.eye(3), half_extent_x, half_extent_y)

    @property
    def normal(self) -> Vector3:
        """Contact normal, third column of R."""
        return self.R[:, 2]

    @property
    def tangent(self) -> NDArray[np.float64]:
        """First two columns of R, mapping local (x, y) to world."""
        return self.R[:, :2]

    def to_local(self, point: Vector3) -> Vector3:
        return self.R.T @ (np.asarray(point, dtype=float) - self.p)

    def to_world(self, local: Vector3) -> Vector3:
        return self.p + self.R @ np.asarray(local, dtype=float)

    def normal_coord(self, point: Vector3) -> float:
        """Signed distance of ``point`` from the contact plane."""
        return float(self.normal @ (np.asarray(point, dtype=float) - self.p))

    def contains_zmp(self, z: Vector3, tol: float = 1e-9) -> bool:
        """Whether a world-frame ZMP lies inside the support rectangle."""
        local = self.to_local(z)
        return (
            abs(local[0]) <= self.half_extent_x + tol
            and abs(local[1]) <= self.half_extent_y + tol
        )


@dataclass(frozen=True)
class FeasibilityLimits:
    """Actuation and kinematic limits of the reduced model.

    Normal-force bounds translate into state-dependent stiffness bounds
    (see :func:`lambda_bounds`); DCM height bounds cap the vertical
    balancing strategy.
    """

    f_min: float  # [N]
    f_max: float  # [N]
    h_min: float  # [m]
    h_max: float  # [m]

    def __post_init__(self):
        if not 0.0 < self.f_min < self.f_max:
            raise ValueError(f"need 0 < f_min < f_max, got ({self.f_min}, {self.f_max})")
        if not self.h_min < self.h_max:
            raise ValueError(f"need h_min < h_max, got ({self.h_min}, {self.h_max})")

    @staticmethod
    def defaults(mass: float, h_min: float = 0.6, h_max: float = 1.0,
                 f_min_scale: float = 0.1, f_max_scale: float = 2.0,
                 g: float = GRAVITY) -> "FeasibilityLimits":
        """Default bounds scaled by the robot's weight."""
        weight = mass * g
        return FeasibilityLimits(f_min_scale * weight, f_max_scale * weight, h_min, h_max)


def zmp_halfspaces(
    geometry: ContactGeometry, z_bar_ref: NDArray[np.float64] | None = None
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Half-space representation C @ dz_bar <= d of the support rectangle.

    ``z_bar_ref`` is the reference ZMP in local frame coordinates; the
    returned bounds apply to the compensation ``dz_bar`` around it, i.e.
    -X <= z_bar_ref_x + dz_bar_x <= X and likewise in y (4 rows).
    """
    ref = np.zeros(2) if z_bar_ref is None else np.asarray(z_bar_ref, dtype=float)
    X, Y = geometry.half_extent_x, geometry.half_extent_y
    C = np.array([
        [+1.0, 0.0],
        [-1.0, 0.0],
        [0.0, +1.0],
        [0.0, -1.0],
    ])
    d = np.array([X - ref[0], X + ref[0], Y - ref[1], Y + ref[1]])
    return C, d


def clamp_zmp(z: Vector3, geometry: ContactGeometry) -> Vector3:
    """Euclidean projection of a ZMP onto the support rectangle.

    Componentwise clamp in the local frame; the result lies on the contact
    plane regardless of the input's normal coordinate.
    """
    local = geometry.to_local(z)
    local[0] = np.clip(local[0], -geometry.half_extent_x, geometry.half_extent_x)
    local[1] = np.clip(local[1], -geometry.half_extent_y, geometry.half_extent_y)
    local[2] = 0.0
    return geometry.to_world(local)


def ray_zmp_intersection(c: Vector3, e: Vector3, geometry: ContactGeometry) -> Vector3:
    """Intersection of the CoM-to-eCMP ray with the contact plane (unclamped)."""
    c = _as_vector3(c, "c")
    e = _as_vector3(e, "e")
    c_n = geometry.normal_coord(c)
    e_n = geometry.normal_coord(e)
    if c_n <= e_n:
        raise DegenerateGeometryError(
            f"CoM-to-eCMP ray does not descend to the contact plane (c_n={c_n}, e_n={e_n})"
        )
    t = c_n / (c_n - e_n)
    return c + t * (e - c)


def ecmp_to_zmp(
    c: Vector3, e: Vector3, b: float, geometry: ContactGeometry
) -> tuple[Vector3, float]:
    """Convert a FIP eCMP into an equivalent VHIP input pair (z, lambda).

    The ZMP is the intersection of the CoM-to-eCMP ray with the contact
    plane; lambda follows from the normal components so that
    ``lambda * (c - z) = (c - e) / b^2``. If the intersection falls outside
    the support area it is clamped (lambda is kept as computed, preserving
    the normal force).
    """
    if b <= 0.0:
        raise ValueError(f"b must be positive, got {b}")
    z = ray_zmp_intersection(c, e, geometry)
    c_n = geometry.normal_coord(c)
    e_n = geometry.normal_coord(e)
    lambda_ = (c_n - e_n) / (b**2 * c_n)
    if not geometry.contains_zmp(z):
        z = clamp_zmp(z, geometry)
    return z, float(lambda_)


def lambda_bounds(
    limits: FeasibilityLimits, mass: float, c: Vector3, geometry: ContactGeometry
) -> tuple[float, float]:
    """Stiffness bounds implied by the normal-force limits at the current CoM."""
    height = geometry.normal_coord(c)
    if height <= 0.0:
        raise DegenerateGeometryError(f"CoM at or below the contact plane (height {height})")
    denom = mass * height
    return limits.f_min / denom, limits.f_max / denom


def omega_bounds(lambda_min: float, lambda_max: float) -> tuple[float, float]:
    """Viable natural-frequency range: square roots of the stiffness bounds."""
    if not 0.0 < lambda_min <= lambda_max:
        raise ValueError(f"need 0 < lambda_min <= lambda_max, got ({lambda_min}, {lambda_max})")
    return float(np.sqrt(lambda_min)), float(np.sqrt(lambda_max))
