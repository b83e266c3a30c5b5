"""Tests for fitting rotor parameters to traces."""
import math

import numpy as np
import pytest

from rotorsim.const import KIND_RABI, KIND_RAMSEY, KIND_SPECTRUM
from rotorsim.exceptions import FitError
from rotorsim.fitting import (
    Dataset,
    FitProblem,
    ModelBinding,
    Parameter,
    fit,
    fitted_curve,
    initial_guesses,
    rabi_model,
    ramsey_model,
    spectrum_model,
    synthetic_dataset,
)

TWO_PI = 2.0 * math.pi
OMEGA = TWO_PI * 5e3


def rabi_problem(geometry, dataset, omega=None, sigma=None, delta_l=2, width="sigma_l"):
    parameters = [Parameter("omega", initial=omega), Parameter(width, initial=sigma)]
    binding = ModelBinding(KIND_RABI, parameters={"omega": "omega", width: width}, fixed={"delta_l": delta_l})
    return FitProblem([dataset], parameters, [binding], geometry)


def noisy_rabi(geometry, rng, points=80, sigma_l=100.0, noise=0.01):
    t = np.linspace(20e-6, 400e-6, points)
    truth = rabi_model(geometry, t, omega=OMEGA, delta_l=2, sigma_l=sigma_l)
    return synthetic_dataset(KIND_RABI, t, truth, noise=noise, rng=rng)


def test_noiseless_data_at_truth_stops_at_once(geometry):
    t = np.linspace(0.0, 1e-3, 100)
    data = Dataset(KIND_RABI, t, rabi_model(geometry, t, omega=OMEGA, delta_l=2, sigma_l=30.0))
    result = fit(rabi_problem(geometry, data, OMEGA, 30.0))
    assert result.converged
    assert result.n_iterations <= 2
    assert result.chi2 < 1e-18
    assert result.value("omega") == pytest.approx(OMEGA, rel=1e-9)


def test_noiseless_data_from_offset_start(geometry):
    t = np.linspace(0.0, 1e-3, 100)
    data = Dataset(KIND_RABI, t, rabi_model(geometry, t, omega=OMEGA, delta_l=2, sigma_l=30.0))
    result = fit(rabi_problem(geometry, data, 1.03 * OMEGA, 27.0))
    assert result.converged
    assert result.value("omega") == pytest.approx(OMEGA, rel=1e-6)
    assert result.value("sigma_l") == pytest.approx(30.0, rel=1e-5)
    assert result.dof == 98
    assert result.covariance_scaled
    np.testing.assert_allclose(
        fitted_curve(rabi_problem(geometry, data, 1.03 * OMEGA, 27.0), result, 0, t), data.y, atol=1e-6
    )


def test_binomial_round_trip(geometry, rng):
    t = np.linspace(20e-6, 1e-3, 200)
    truth = rabi_model(geometry, t, omega=OMEGA, delta_l=2, sigma_l=100.0)
    data = synthetic_dataset(KIND_RABI, t, truth, shots=1000, rng=rng)
    result = fit(rabi_problem(geometry, data, 1.05 * OMEGA, 90.0))
    assert result.converged
    assert not result.covariance_scaled
    assert result.within("omega", OMEGA)
    assert result.within("sigma_l", 100.0, n_sigma=4.0)
    assert 0.5 < result.chi2_reduced < 1.6


def test_point_order_does_not_matter(geometry, rng):
    data = noisy_rabi(geometry, rng)
    shuffled = data.permuted(np.random.default_rng(5).permutation(len(data)))
    first = fit(rabi_problem(geometry, data, 1.02 * OMEGA, 95.0))
    second = fit(rabi_problem(geometry, shuffled, 1.02 * OMEGA, 95.0))
    for label in first.labels:
        assert second.value(label) == pytest.approx(first.value(label), rel=1e-7)
        assert second.error(label) == pytest.approx(first.error(label), rel=1e-4)


def test_width_parameterisations_agree(geometry, rng):
    data = noisy_rabi(geometry, rng)
    by_sigma = fit(rabi_problem(geometry, data, 1.02 * OMEGA, 95.0))
    gamma0 = 4.0 * geometry.omega_r * 95.0
    by_gamma = fit(rabi_problem(geometry, data, 1.02 * OMEGA, gamma0, width="gamma_per_order"))
    sigma = by_sigma.value("sigma_l")
    assert by_gamma.value("gamma_per_order") / (4.0 * geometry.omega_r) == pytest.approx(sigma, rel=1e-6)
    assert by_gamma.derived["gamma_per_order"]["sigma_l"] == pytest.approx(sigma, rel=1e-6)
    assert by_sigma.derived["sigma_l"]["gamma_per_order_rad_s"] == pytest.approx(
        4.0 * geometry.omega_r * sigma
    )


def ramsey_pair(geometry, rng):
    """Ramsey fringes on two sidebands sharing one width, with their bindings."""
    datasets = []
    bindings = []
    for delta_l, stop, detuning in ((1, 1e-3, TWO_PI * 6e3), (4, 300e-6, TWO_PI * 5.5e3)):
        t = np.linspace(0.0, stop, 150)
        truth = ramsey_model(
            geometry, t, detuning=detuning, omega=TWO_PI * 25e3, delta_l=delta_l, sigma_l=42.7, pulse_duration=6e-6
        )
        datasets.append(synthetic_dataset(KIND_RAMSEY, t, truth, noise=0.01, rng=rng))
        bindings.append(
            ModelBinding(
                KIND_RAMSEY,
                parameters={"sigma_l": "sigma_l", "detuning": "detuning", "omega": "omega"},
                fixed={"delta_l": delta_l, "pulse_duration": 6e-6},
            )
        )
    return datasets, bindings


def ramsey_parameters(detuning_guesses):
    return [
        Parameter("sigma_l", initial=36.0),
        Parameter("detuning", initial=list(detuning_guesses), shared=False),
        Parameter("omega", initial=TWO_PI * 25e3, vary=False),
    ]


def test_joint_ramsey_shares_width(geometry, rng):
    datasets, bindings = ramsey_pair(geometry, rng)
    parameters = ramsey_parameters([TWO_PI * 6.1e3, TWO_PI * 5.4e3])
    result = fit(FitProblem(datasets, parameters, bindings, geometry))
    assert result.converged
    assert result.labels == ["detuning[0]", "sigma_l", "detuning[1]"]
    assert result.within("sigma_l", 42.7)
    assert result.within("detuning[0]", TWO_PI * 6e3)
    assert result.within("detuning[1]", TWO_PI * 5.5e3)
    assert len(result.residuals) == 2


def test_joint_fit_ignores_dataset_order(geometry, rng):
    datasets, bindings = ramsey_pair(geometry, rng)
    guesses = [TWO_PI * 6.1e3, TWO_PI * 5.4e3]
    forward = fit(FitProblem(datasets, ramsey_parameters(guesses), bindings, geometry))
    backward = fit(FitProblem(datasets[::-1], ramsey_parameters(guesses[::-1]), bindings[::-1], geometry))
    assert forward.converged and backward.converged
    assert backward.value("sigma_l") == pytest.approx(forward.value("sigma_l"), rel=1e-9)
    assert backward.value("detuning[0]") == pytest.approx(forward.value("detuning[1]"), rel=1e-9)
    assert backward.value("detuning[1]") == pytest.approx(forward.value("detuning[0]"), rel=1e-9)
    assert backward.chi2 == pytest.approx(forward.chi2, rel=1e-9)


def test_spectrum_fit_recovers_angle(geometry):
    f_rot = 100e3
    x = TWO_PI * np.concatenate([np.linspace(n * f_rot - 6e3, n * f_rot + 6e3, 121) for n in range(-4, 5)])
    fixed = {"omega": TWO_PI * 2e3, "probe_time": 250e-6, "sigma_l": 46.0, "max_order": 6}
    truth = spectrum_model(geometry, x, theta=math.radians(82.4), f_rot=f_rot, **fixed)
    data = Dataset(KIND_SPECTRUM, x, truth)
    parameters = [Parameter("theta", initial=math.radians(81.5)), Parameter("f_rot", initial=100.2e3)]
    binding = ModelBinding(KIND_SPECTRUM, parameters={"theta": "theta", "f_rot": "f_rot"}, fixed=fixed)
    result = fit(FitProblem([data], parameters, [binding], geometry))
    assert result.converged
    assert math.degrees(result.value("theta")) == pytest.approx(82.4, abs=0.5)
    assert result.value("f_rot") == pytest.approx(f_rot, rel=1e-3)


@pytest.mark.slow
def test_uncertainties_cover_truth(geometry):
    rng = np.random.default_rng(42)
    trials = 400
    covered = 0
    for _ in range(trials):
        result = fit(rabi_problem(geometry, noisy_rabi(geometry, rng), OMEGA, 100.0))
        assert result.converged
        covered += result.within("omega", OMEGA, n_sigma=1.0)
    assert covered / trials == pytest.approx(0.68, abs=0.07)


def test_multi_start(geometry, rng):
    result = fit(rabi_problem(geometry, noisy_rabi(geometry, rng), 1.02 * OMEGA, 95.0), multi_start=True, seed=1)
    assert result.starts_tried == 6
    assert result.converged


def test_missing_initial_values_are_guessed(geometry):
    t = np.linspace(0.0, 1e-3, 200)
    data = Dataset(KIND_RABI, t, rabi_model(geometry, t, omega=OMEGA, delta_l=1, sigma_l=10.0))
    problem = rabi_problem(geometry, data, None, 10.0, delta_l=1)
    guesses = initial_guesses(problem)
    assert set(guesses) == {("omega", 0)}
    assert guesses[("omega", 0)] == pytest.approx(OMEGA, rel=0.1)


def test_insensitive_parameter_is_not_converged(geometry):
    t = np.linspace(0.0, 3e-4, 60)
    truth = ramsey_model(geometry, t, detuning=TWO_PI * 6e3, omega=1.0, delta_l=1, sigma_l=40.0, ideal_pulses=True)
    data = Dataset(KIND_RAMSEY, t, truth)
    parameters = [
        Parameter("detuning", initial=TWO_PI * 6e3),
        Parameter("omega", initial=TWO_PI * 10e3),
        Parameter("sigma_l", initial=40.0),
    ]
    binding = ModelBinding(
        KIND_RAMSEY,
        parameters={"detuning": "detuning", "omega": "omega", "sigma_l": "sigma_l"},
        fixed={"delta_l": 1, "ideal_pulses": True},
    )
    result = fit(FitProblem([data], parameters, [binding], geometry))
    assert not result.converged
    assert "omega" in result.message
    assert result.as_dict()["converged"] is False


def test_structural_errors(geometry):
    t = np.linspace(0.0, 1e-3, 20)
    data = Dataset(KIND_RABI, t, np.full(20, 0.5))
    omega = Parameter("omega", initial=OMEGA)
    sigma = Parameter("sigma_l", initial=10.0)

    def problem(binding, parameters=(omega, sigma), datasets=(data,)):
        return FitProblem(list(datasets), list(parameters), [binding], geometry)

    with pytest.raises(FitError):
        problem(ModelBinding(KIND_RABI, {"omega": "omega"}, {"delta_l": 1}))
    with pytest.raises(FitError):
        problem(ModelBinding(KIND_RABI, {"omega": "omega", "sigma_l": "sigma_l"}, {"delta_l": 1, "sigma_l": 3.0}))
    with pytest.raises(FitError):
        problem(ModelBinding(KIND_RABI, {"omega": "omega", "sigma_l": "sigma_l"}, {}))
    with pytest.raises(FitError):
        problem(ModelBinding(KIND_RABI, {"omega": "omega", "sigma_l": "width"}, {"delta_l": 1}))
    with pytest.raises(FitError):
        problem(ModelBinding(KIND_RAMSEY, {"omega": "omega", "sigma_l": "sigma_l"}, {"delta_l": 1}))
    with pytest.raises(FitError):
        problem(
            ModelBinding(KIND_RABI, {"omega": "omega", "sigma_l": "sigma_l", "delta_l": "omega"}, {}),
        )
    with pytest.raises(FitError):
        problem(ModelBinding(KIND_RABI, {"omega": "omega", "sigma_l": "sigma_l"}, {"delta_l": 1}), (omega, omega))
    with pytest.raises(FitError):
        Parameter("sigma_l", initial=[1.0, 2.0])
    with pytest.raises(FitError):
        Parameter("theta", lower=1.0, upper=0.5)

    binding = ModelBinding(KIND_RABI, {"omega": "omega", "sigma_l": "sigma_l"}, {"delta_l": 1})
    with pytest.raises(FitError):
        fit(problem(binding, (omega, Parameter("sigma_l", initial=-5.0))))
    with pytest.raises(FitError):
        fit(problem(binding, (Parameter("omega", initial=OMEGA, vary=False), Parameter("sigma_l", initial=1.0, vary=False))))
    with pytest.raises(FitError):
        fit(problem(binding, datasets=(Dataset(KIND_RABI, [0.0, 1e-4], [0.0, 0.5]),)))
