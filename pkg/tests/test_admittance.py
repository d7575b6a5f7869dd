"""Vertical force measurement and CoM admittance compliance."""

import numpy as np
import pytest

from vhip_balance.admittance import (
    DEFAULT_ADMITTANCE_GAIN,
    ForceMeasurement,
    measure_lambda,
    run_vertical_compliance,
    vertical_com_admittance,
)
from vhip_balance.geometry import ContactGeometry, DegenerateGeometryError
from vhip_balance.models import GRAVITY

MASS = 38.0


def test_measure_lambda_recovers_static_stiffness():
    geometry = ContactGeometry.flat(0.1, 0.1)
    h = 0.8
    force = ForceMeasurement([0.0, 0.0, MASS * GRAVITY])
    lam = measure_lambda(force, MASS, np.array([0.0, 0.0, h]), geometry)
    assert lam == pytest.approx(GRAVITY / h)


def test_measure_lambda_uses_only_the_normal_component():
    geometry = ContactGeometry.flat(0.1, 0.1)
    force = ForceMeasurement([50.0, -30.0, MASS * GRAVITY])
    lam = measure_lambda(force, MASS, np.array([0.0, 0.0, 0.8]), geometry)
    assert lam == pytest.approx(GRAVITY / 0.8)


def test_measure_lambda_rejects_com_on_contact_plane():
    geometry = ContactGeometry.flat(0.1, 0.1)
    force = ForceMeasurement([0.0, 0.0, 100.0])
    with pytest.raises(DegenerateGeometryError):
        measure_lambda(force, MASS, np.array([0.0, 0.0, 0.0]), geometry)


def test_admittance_sign_convention():
    # Measured stiffness above commanded (pushed down) -> comply downward.
    assert vertical_com_admittance(12.0, 13.0, 0.005) < 0.0
    assert vertical_com_admittance(12.0, 11.0, 0.005) > 0.0
    assert vertical_com_admittance(12.0, 12.0, 0.005) == 0.0
    with pytest.raises(ValueError):
        vertical_com_admittance(12.0, 13.0, -0.001)


def test_force_noise_is_seeded_and_validated():
    f = ForceMeasurement([0.0, 0.0, 100.0])
    a = f.with_noise(np.random.default_rng(4), 2.0)
    b = f.with_noise(np.random.default_rng(4), 2.0)
    assert np.array_equal(a.f, b.f)
    assert not np.array_equal(a.f, f.f)
    with pytest.raises(ValueError):
        f.with_noise(np.random.default_rng(0), -1.0)


def test_downward_push_raises_measured_stiffness_and_lowers_com():
    log = run_vertical_compliance(
        mass=MASS, height0=0.8, A_z=DEFAULT_ADMITTANCE_GAIN,
        push_force=80.0, push_window=(1.0, 2.0), duration=3.0)
    during = (log.t >= 1.0) & (log.t < 2.0)
    assert np.all(log.lambda_measured[during] > log.lambda_commanded[during])
    # CoM height decreases monotonically while the push is applied.
    heights = log.height[during]
    assert np.all(np.diff(heights) <= 0.0)
    assert heights[-1] < heights[0]
    # Before the push nothing moves.
    before = log.t < 1.0
    assert np.allclose(log.height[before], 0.8)


def test_zero_gain_is_exactly_stiff():
    log = run_vertical_compliance(
        mass=MASS, height0=0.8, A_z=0.0,
        push_force=80.0, push_window=(1.0, 2.0), duration=3.0)
    assert np.all(log.height == 0.8)


def test_zero_gain_stiff_even_with_noise():
    log = run_vertical_compliance(
        mass=MASS, height0=0.8, A_z=0.0,
        push_force=80.0, push_window=(1.0, 2.0), duration=3.0,
        noise_std=5.0, seed=3)
    assert np.all(log.height == 0.8)
    assert np.std(log.lambda_measured) > 0.0


def test_compliance_scales_with_gain():
    dip = {}
    for A_z in (0.002, 0.01):
        log = run_vertical_compliance(
            mass=MASS, height0=0.8, A_z=A_z,
            push_force=80.0, push_window=(1.0, 2.0), duration=2.0)
        dip[A_z] = 0.8 - log.height.min()
    assert dip[0.01] > dip[0.002] > 0.0
