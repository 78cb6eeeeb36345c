import math

import numpy as np
import pytest

from photonagent.errors import ValidationError
from photonagent.modes import ModeParams, make_exponential_mode
from photonagent.source import (BathParams, ControlEnvelope, ground_population_source,
                                mean_output_field, output_flux, polarization, tau_source)

KAPPA = 8.0


def unit_mode_envelope(gamma=1.0, scale=1.0):
    return ControlEnvelope.from_mode(make_exponential_mode(ModeParams(gamma, 0.0)), scale)


class TestBathParams:
    def test_nbar_formula(self):
        bath = BathParams(2.0)
        assert bath.nbar == pytest.approx(1.0 / (math.exp(2.0) - 1.0), abs=1e-15)

    def test_zero_temperature(self):
        bath = BathParams(math.inf)
        assert bath.nbar == 0.0
        assert bath.tanh_half() == 1.0
        assert bath.ground_floor() == 0.0

    def test_rejects_negative_mu(self):
        with pytest.raises(ValidationError):
            BathParams(-1.0)

    def test_unit_nbar_at_mu_ln2(self):
        assert BathParams(math.log(2.0)).nbar == pytest.approx(1.0, abs=1e-14)


class TestTau:
    def test_zero_drive(self):
        env = ControlEnvelope.zero()
        for t in (0.0, 1.0, 7.5):
            assert tau_source(env, BathParams(math.inf), KAPPA, t) == 0.0

    def test_constant_drive(self):
        # I = kappa/4, nbar = 0: tau(1) = 1
        env = ControlEnvelope.constant(math.sqrt(KAPPA / 4.0))
        tau = tau_source(env, BathParams(math.inf), KAPPA, 1.0)
        assert tau == pytest.approx(1.0, abs=1e-8)

    def test_unit_norm_pulse_saturates(self):
        # scalar path integrates on an internal trapezoid grid
        env = unit_mode_envelope()
        tau = tau_source(env, BathParams(math.inf), KAPPA, 60.0)
        assert tau == pytest.approx(4.0 / KAPPA, rel=1e-4)
        # on a caller-supplied dense grid the value tightens accordingly
        grid = np.linspace(0.0, 60.0, 2 ** 18 + 1)
        tau_grid = tau_source(env, BathParams(math.inf), KAPPA, grid)[-1]
        assert tau_grid == pytest.approx(4.0 / KAPPA, rel=1e-8)

    def test_monotone_on_grid(self):
        env = unit_mode_envelope()
        grid = np.linspace(0.0, 20.0, 2001)
        tau = tau_source(env, BathParams(2.0), KAPPA, grid)
        assert np.all(np.diff(tau) >= 0)

    def test_rejects_negative_time(self):
        with pytest.raises(ValidationError):
            tau_source(ControlEnvelope.zero(), BathParams(2.0), KAPPA, -1.0)
        with pytest.raises(ValidationError):
            tau_source(ControlEnvelope.zero(), BathParams(2.0), 0.0, 1.0)


class TestGroundPopulation:
    def test_initial_condition(self):
        env = unit_mode_envelope()
        p0 = ground_population_source(env, BathParams(2.0), KAPPA, 0.0)
        assert p0 == pytest.approx(1.0 / (1.0 + math.exp(-2.0)), abs=1e-14)

    def test_perfect_emission_at_zero_temperature(self):
        # strong flat drive: tau grows without bound, P_g -> 0
        env = ControlEnvelope.constant(math.sqrt(25.0 * KAPPA))
        p = ground_population_source(env, BathParams(math.inf), KAPPA, 5.0)
        assert p == pytest.approx(0.0, abs=1e-12)

    def test_hot_bath_limit_one_third(self):
        # nbar = 1 at mu = ln 2: long-time P_g -> nbar/(2 nbar + 1) = 1/3
        env = ControlEnvelope.constant(math.sqrt(25.0 * KAPPA))
        p = ground_population_source(env, BathParams(math.log(2.0)), KAPPA, 5.0)
        assert p == pytest.approx(1.0 / 3.0, abs=1e-10)

    def test_bounded_and_monotone(self):
        env = unit_mode_envelope(scale=3.0)
        grid = np.linspace(0.0, 30.0, 3001)
        p = ground_population_source(env, BathParams(1.5), KAPPA, grid)
        assert np.all((0.0 <= p) & (p <= 1.0))
        assert np.all(np.diff(p) <= 1e-15)

    def test_satisfies_rate_equation(self):
        # numerical derivative of the closed form against the rate equation
        env = unit_mode_envelope(scale=2.0)
        bath = BathParams(2.0)
        h = 2e-5
        grid = np.arange(0.0, 2.0 + h, h)
        p = ground_population_source(env, bath, KAPPA, grid)
        intensity = env.intensity(grid)
        dp_dt = (p[2:] - p[:-2]) / (2 * h)
        rhs = (-4.0 * intensity[1:-1] / KAPPA * (2 * bath.nbar + 1) * p[1:-1]
               + 4.0 * intensity[1:-1] * bath.nbar / KAPPA)
        assert np.max(np.abs(dp_dt - rhs)) < 1e-8


class TestPolarization:
    def test_saturated_zero_temperature(self):
        env = ControlEnvelope.constant(math.sqrt(25.0 * KAPPA))
        assert polarization(env, BathParams(math.inf), KAPPA, 5.0) == pytest.approx(1.0, abs=1e-12)

    def test_saturated_finite_temperature(self):
        env = ControlEnvelope.constant(math.sqrt(25.0 * KAPPA))
        sz = polarization(env, BathParams(2.0), KAPPA, 5.0)
        assert sz == pytest.approx(math.tanh(1.0), abs=1e-10)

    def test_initial_value(self):
        env = unit_mode_envelope()
        sz = polarization(env, BathParams(2.0), KAPPA, 0.0)
        assert sz == pytest.approx(-math.tanh(1.0), abs=1e-14)

    def test_long_time_equilibrium_tight(self):
        # tau >= 40 pins the asymptote to 1e-10
        env = ControlEnvelope.constant(math.sqrt(11.0 * KAPPA))
        bath = BathParams(1.0)
        tau = tau_source(env, bath, KAPPA, 2.0)
        assert tau >= 40.0
        sz = polarization(env, bath, KAPPA, 2.0)
        assert abs(sz - math.tanh(0.5)) < 1e-10


class TestOutputFlux:
    def test_zero_drive_gives_thermal_flux(self):
        bath = BathParams(2.0)
        assert output_flux(ControlEnvelope.zero(), bath, KAPPA, 3.0) == pytest.approx(bath.nbar)

    def test_saturated_zero_temperature(self):
        env = ControlEnvelope.constant(math.sqrt(KAPPA / 4.0))
        # tau grows slowly for I = kappa/4; evaluate late
        flux = output_flux(env, BathParams(math.inf), KAPPA, 60.0)
        assert flux == pytest.approx(1.0, abs=1e-10)

    def test_saturated_finite_temperature(self):
        env = ControlEnvelope.constant(math.sqrt(KAPPA / 4.0))
        bath = BathParams(2.0)
        flux = output_flux(env, bath, KAPPA, 80.0)
        assert flux == pytest.approx(bath.nbar + math.tanh(1.0), abs=1e-10)
        assert flux == pytest.approx(0.9181117987054306, abs=1e-10)


class TestMeanOutputField:
    def test_zero_coherence(self):
        env = unit_mode_envelope()
        assert mean_output_field(env, lambda t: np.zeros_like(t), KAPPA, 4.0) == 0

    def test_zero_drive(self):
        assert mean_output_field(ControlEnvelope.zero(),
                                 lambda t: np.ones_like(t), KAPPA, 4.0) == 0

    def test_constant_drive_and_coherence(self):
        e0, s0, t = 0.8, 0.25, 3.0
        env = ControlEnvelope.constant(e0)
        val = mean_output_field(env, lambda tt: np.full_like(tt, s0), KAPPA, t)
        expected = -1j * math.sqrt(KAPPA) * e0 * s0 * (2.0 / KAPPA) * (1 - math.exp(-KAPPA * t / 2))
        assert val == pytest.approx(expected, abs=1e-10)
