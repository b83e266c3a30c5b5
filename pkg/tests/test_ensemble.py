"""Tests for Monte-Carlo release ensembles."""
import math

import numpy as np
import pytest

from rotorsim.exceptions import DomainError
from rotorsim.physics import mean_quantum_number
from rotorsim.spinup import ThermalOccupation, build_waveform, monte_carlo_release
from rotorsim.spinup.ensemble import trajectory_seed

OMEGA_TILT = 2.0 * math.pi * 280e3


@pytest.fixture(name="short_protocol")
def short_protocol_fixture():
    return build_waveform(100e3, 20e-6, 100e-6, OMEGA_TILT)


def test_trajectory_seeds():
    assert trajectory_seed(5, 3) == [5, 3]
    assert trajectory_seed(5, 1, seeds=[11, 12]) == 12


def test_doubling_temperature_widens_by_sqrt_two(geometry, short_protocol):
    cold = monte_carlo_release(16, 10.0, short_protocol, geometry, seed=4)
    hot = monte_carlo_release(16, 20.5, short_protocol, geometry, seed=4)
    assert hot.sigma_l_est / cold.sigma_l_est == pytest.approx(math.sqrt(2.0), rel=0.05)
    assert hot.trajectories_kept == cold.trajectories_kept == 16
    assert hot.seeds == cold.seeds


def test_unrotated_release_has_no_mean_angular_momentum(geometry):
    waveform = build_waveform(0.0, 20e-6, 100e-6, OMEGA_TILT)
    result = monte_carlo_release(24, ThermalOccupation(nbar=10.0), waveform, geometry, seed=9)
    assert result.sigma_l_est > 0
    assert abs(result.l0_est) <= 4.0 * result.sigma_l_est / math.sqrt(24)
    assert result.frequency_offset == result.final_f_rot_mean


def test_result_does_not_depend_on_threads(geometry, short_protocol):
    single = monte_carlo_release(8, 10.0, short_protocol, geometry, seed=2, threads=1, chunk_size=3)
    pooled = monte_carlo_release(8, 10.0, short_protocol, geometry, seed=2, threads=3, chunk_size=3)
    assert single.l_values == pooled.l_values
    assert single.as_dict() == pooled.as_dict()


def test_seed_controls_draws(geometry, short_protocol):
    first = monte_carlo_release(4, 10.0, short_protocol, geometry, seed=1)
    repeat = monte_carlo_release(4, 10.0, short_protocol, geometry, seed=1)
    other = monte_carlo_release(4, 10.0, short_protocol, geometry, seed=2)
    explicit = monte_carlo_release(4, 10.0, short_protocol, geometry, seeds=[[1, 0], [1, 1], [1, 2], [1, 3]])
    assert first.l_values == repeat.l_values
    assert first.l_values != other.l_values
    assert explicit.l_values == first.l_values


def test_equal_seeds_give_equal_trajectories(geometry, short_protocol):
    result = monte_carlo_release(2, 0.0, short_protocol, geometry, seeds=[[1, 0], [1, 0]])
    assert result.l_values[0] == result.l_values[1]
    assert result.final_f_rot_std == 0.0
    assert result.sigma_l_est == 0.0
    assert result.skewness == result.excess_kurtosis == 0.0


def test_ground_state_spread_is_the_zero_point_floor(geometry, short_protocol):
    ground = monte_carlo_release(16, 0.0, short_protocol, geometry, seed=4)
    warm = monte_carlo_release(16, 10.0, short_protocol, geometry, seed=4)
    assert ground.sigma_l_est > 0
    # spread scales with the square root of 2 nbar + 1
    assert warm.sigma_l_est / ground.sigma_l_est == pytest.approx(math.sqrt(21.0), rel=0.05)


def test_ensemble_validation(geometry, short_protocol):
    with pytest.raises(DomainError):
        monte_carlo_release(1, 10.0, short_protocol, geometry)
    with pytest.raises(DomainError):
        monte_carlo_release(3, 10.0, short_protocol, geometry, seeds=[1, 2])
    with pytest.raises(DomainError):
        monte_carlo_release(3, 10.0, short_protocol, geometry, chunk_size=0)


@pytest.mark.slow
def test_full_protocol_reaches_target(geometry):
    waveform = build_waveform(100e3, 50e-6, 1e-3, OMEGA_TILT, geometry=geometry, t_free=1e-4)
    result = monte_carlo_release(64, ThermalOccupation(temperature=0.52e-3), waveform, geometry, seed=0)
    assert abs(result.frequency_offset) < 0.02
    assert result.l0_est == pytest.approx(7780.0, rel=0.02)
    assert result.l0_est == pytest.approx(mean_quantum_number(geometry, result.final_f_rot_mean), rel=0.02)
    assert result.free_angular_momentum_drift < 1e-8
    assert np.isfinite(result.skewness)
    assert np.isfinite(result.excess_kurtosis)
    assert result.as_dict()["frequency_offset"] == result.frequency_offset


@pytest.mark.slow
def test_full_protocol_from_the_ground_state(geometry):
    waveform = build_waveform(100e3, 50e-6, 1e-3, OMEGA_TILT, geometry=geometry)
    ground = monte_carlo_release(64, 0.0, waveform, geometry, seed=0)
    thermal = monte_carlo_release(64, ThermalOccupation(temperature=0.52e-3), waveform, geometry, seed=0)
    assert ground.trajectories_kept == 64
    assert ground.l0_est == pytest.approx(7780.0, rel=0.02)
    assert 0 < ground.sigma_l_est < thermal.sigma_l_est
    assert np.isfinite(ground.sigma_l_est)
