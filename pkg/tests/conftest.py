"""Shared fixtures for the balance-control test suite."""

from __future__ import annotations

import numpy as np
import pytest

from vhip_balance.config import load_config
from vhip_balance.controllers import ControllerGains
from vhip_balance.geometry import ContactGeometry, FeasibilityLimits
from vhip_balance.models import ReferenceSetpoint


@pytest.fixture
def reference() -> ReferenceSetpoint:
    """Static equilibrium 0.8 m above a ZMP near the +y sole edge."""
    z_d = np.array([0.0, 0.023, 0.0])
    return ReferenceSetpoint.static_equilibrium(z_d + [0.0, 0.0, 0.8], z_d)


@pytest.fixture
def geometry() -> ContactGeometry:
    return ContactGeometry.flat(0.112, 0.065)


@pytest.fixture
def limits() -> FeasibilityLimits:
    return FeasibilityLimits.defaults(mass=38.0)


@pytest.fixture
def gains() -> ControllerGains:
    return ControllerGains()


@pytest.fixture
def fig2_config():
    return load_config("fig2")
