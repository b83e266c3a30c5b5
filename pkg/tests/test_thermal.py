"""Tests for thermal tilt-mode initial conditions."""
import math

import numpy as np
import pytest

from rotorsim.const import BOLTZMANN, HBAR
from rotorsim.exceptions import DomainError
from rotorsim.spinup import ThermalOccupation, sample_thermal_tilt, tilt_variances
from rotorsim.spinup.forces import pinned_equilibrium, rotation_generator

OMEGA_TILT = 2.0 * math.pi * 280e3


def test_occupation_needs_one_description():
    with pytest.raises(DomainError):
        ThermalOccupation()
    with pytest.raises(DomainError):
        ThermalOccupation(nbar=1.0, temperature=1e-3)
    with pytest.raises(DomainError):
        ThermalOccupation(nbar=-1.0)


def test_mean_occupation():
    assert ThermalOccupation(nbar=3.5).mean_occupation(OMEGA_TILT) == 3.5
    assert ThermalOccupation(temperature=0.0).mean_occupation(OMEGA_TILT) == 0.0
    hot = ThermalOccupation(temperature=1e-3).mean_occupation(OMEGA_TILT)
    assert hot == pytest.approx(BOLTZMANN * 1e-3 / (HBAR * OMEGA_TILT) - 0.5, rel=1e-3)


def test_zero_point_variances(geometry):
    var_q, var_v = tilt_variances(0.0, OMEGA_TILT, geometry)
    assert var_q == pytest.approx(0.5 * HBAR / (geometry.ion_mass * OMEGA_TILT))
    assert var_v == pytest.approx(var_q * OMEGA_TILT ** 2)
    with pytest.raises(DomainError):
        tilt_variances(0.0, 0.0, geometry)


def test_variances_scale_with_occupation(geometry):
    low = tilt_variances(10.0, OMEGA_TILT, geometry)
    high = tilt_variances(20.5, OMEGA_TILT, geometry)
    assert high[0] / low[0] == pytest.approx(2.0)
    assert high[1] / low[1] == pytest.approx(2.0)


def test_draw_is_a_pure_tilt(geometry):
    base = pinned_equilibrium(geometry, 0.5 * OMEGA_TILT ** 2)
    state = sample_thermal_tilt(10.0, OMEGA_TILT, geometry, seed=[7, 3])
    displacement = state.positions - base.positions
    np.testing.assert_allclose(displacement[0], -displacement[1], atol=1e-18)
    assert abs(np.dot(displacement[0], base.positions[0])) < 1e-12 * geometry.r_e ** 2
    assert abs(np.dot(state.velocities[0], base.positions[0])) < 1e-9 * geometry.r_e * np.linalg.norm(
        state.velocities[0]
    )


def test_draw_is_deterministic(geometry):
    first = sample_thermal_tilt(5.0, OMEGA_TILT, geometry, seed=[1, 2])
    second = sample_thermal_tilt(5.0, OMEGA_TILT, geometry, seed=[1, 2])
    other = sample_thermal_tilt(5.0, OMEGA_TILT, geometry, seed=[1, 3])
    np.testing.assert_array_equal(first.positions, second.positions)
    np.testing.assert_array_equal(first.velocities, second.velocities)
    assert not np.array_equal(first.velocities, other.velocities)


def test_draw_statistics(geometry):
    var_q, var_v = tilt_variances(10.0, OMEGA_TILT, geometry)
    base = pinned_equilibrium(geometry, 0.5 * OMEGA_TILT ** 2)
    generator = rotation_generator(base.positions)
    q = []
    v = []
    for index in range(2000):
        state = sample_thermal_tilt(10.0, OMEGA_TILT, geometry, seed=[11, index])
        q.append(np.dot((state.positions - base.positions).reshape(4), generator))
        v.append(np.dot(state.velocities.reshape(4), generator))
    assert np.var(q) == pytest.approx(var_q, rel=0.1)
    assert np.var(v) == pytest.approx(var_v, rel=0.1)
