import math

import numpy as np
import pytest

from photonagent.detector import (DetectionModel, DetectorParams, error_prob,
                                  pg_classical, pg_quantum,
                                  pg_time_dependent_quadrature, scaled_control,
                                  thermal_floor)
from photonagent.errors import ValidationError
from photonagent.modes import ModeParams, make_exponential_mode
from photonagent.source import BathParams


def det(mu=2.0, chi=1.0, eta=1.0, kappa=1000.0):
    return DetectorParams(kappa=kappa, bath=BathParams(mu), chi=chi, eta=eta)


class TestDetectorParams:
    def test_rejects_bad_efficiencies(self):
        with pytest.raises(ValidationError):
            det(chi=0.0)
        with pytest.raises(ValidationError):
            det(chi=1.5)
        with pytest.raises(ValidationError):
            det(eta=0.0)
        with pytest.raises(ValidationError):
            det(kappa=-1.0)

    def test_amplitude_scale_matches_chi(self):
        d = det(chi=0.01, eta=1.0, kappa=1000.0)
        a = d.control_amplitude_scale()
        assert 4 * d.eta * a ** 2 / d.kappa == pytest.approx(d.chi, abs=1e-15)


class TestThermalFloor:
    def test_zero_temperature(self):
        assert thermal_floor(BathParams(math.inf)) == 0.0

    def test_mu_two(self):
        assert thermal_floor(BathParams(2.0)) == pytest.approx(1 / (1 + math.e ** 2), abs=1e-15)

    def test_infinite_temperature_limit(self):
        assert thermal_floor(BathParams(0.0)) == pytest.approx(0.5, abs=1e-15)
        assert thermal_floor(BathParams(1e-9)) == pytest.approx(0.5, abs=1e-9)


class TestClosedForms:
    def test_quantum_ideal_detection(self):
        assert pg_quantum(1.0, det(mu=math.inf)) == 1.0

    def test_quantum_floor_only(self):
        assert pg_quantum(0.0, det(mu=2.0)) == pytest.approx(0.11920292202211755, abs=1e-15)

    def test_quantum_half(self):
        # floor(mu=2) + 0.5*tanh(1) is exactly one half
        assert pg_quantum(0.5, det(mu=2.0)) == pytest.approx(0.5, abs=1e-15)

    def test_classical_ideal_detection(self):
        assert pg_classical(1.0, det(mu=math.inf)) == pytest.approx(math.exp(-1.0), abs=1e-15)

    def test_classical_floor_only(self):
        d = det(mu=2.0)
        assert pg_classical(0.0, d) == thermal_floor(d.bath)

    def test_classical_half(self):
        expected = 1 / (1 + math.e ** 2) + 0.5 * math.exp(-0.5) * math.tanh(1.0)
        assert pg_classical(0.5, det(mu=2.0)) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.35016802, abs=1e-8)

    def test_error_prob(self):
        assert error_prob(DetectionModel.QUANTUM, 1.0, det(mu=math.inf)) == 0.0
        assert error_prob(DetectionModel.CLASSICAL, 1.0, det(mu=math.inf)) == pytest.approx(
            1 - math.exp(-1.0), abs=1e-15)
        assert error_prob(DetectionModel.QUANTUM, 0.5, det(mu=2.0)) == pytest.approx(0.5, abs=1e-15)

    def test_rejects_bad_overlap(self):
        with pytest.raises(ValidationError):
            pg_quantum(1.1, det())
        with pytest.raises(ValidationError):
            pg_classical(-0.2, det())


class TestOrderingAndMonotonicity:
    def test_quantum_dominates_classical(self):
        d = det(mu=2.0)
        grid = np.linspace(0.0, 1.0, 1000)
        pq = np.array([pg_quantum(g, d) for g in grid])
        pc = np.array([pg_classical(g, d) for g in grid])
        assert np.all(pq >= pc)
        assert pq[0] == pc[0]
        assert np.all(pq[1:] > pc[1:])

    def test_quantum_strictly_increasing(self):
        d = det(mu=1.0)
        grid = np.linspace(0.0, 1.0, 500)
        pq = np.array([pg_quantum(g, d) for g in grid])
        assert np.all(np.diff(pq) > 0)

    def test_classical_increasing_below_unit_exposure(self):
        d = det(mu=1.0, chi=1.0)
        grid = np.linspace(0.0, 0.999, 500)
        pc = np.array([pg_classical(g, d) for g in grid])
        assert np.all(np.diff(pc) > 0)

    def test_probabilities_stay_physical(self):
        rng = np.random.default_rng(23)
        for _ in range(300):
            d = det(mu=rng.uniform(0.0, 6.0) if rng.random() < 0.8 else math.inf,
                    chi=rng.uniform(1e-3, 1.0), eta=rng.uniform(1e-3, 1.0),
                    kappa=rng.uniform(1.0, 1e4))
            g = rng.uniform(0.0, 1.0)
            for val in (pg_quantum(g, d), pg_classical(g, d),
                        error_prob(DetectionModel.QUANTUM, g, d),
                        error_prob(DetectionModel.CLASSICAL, g, d)):
                assert 0.0 <= val <= 1.0


class TestTimeDependentQuadrature:
    def test_vacuum_signal_gives_floor(self):
        d = det(mu=2.0, chi=0.01)
        control = scaled_control(make_exponential_mode(ModeParams(1.0, 0.0)),
                                 d.control_amplitude_scale())

        class Vacuum:
            def amplitude(self, t):
                return np.zeros(np.asarray(t, dtype=float).shape, dtype=complex)

        for t in (0.5, 5.0, 40.0):
            p = pg_time_dependent_quadrature(control, Vacuum(), d, t)
            assert p == pytest.approx(thermal_floor(d.bath), abs=1e-12)

    def test_zero_control_gives_floor(self):
        d = det(mu=2.0, chi=0.01)
        signal = make_exponential_mode(ModeParams(1.0, 0.0))
        control = scaled_control(signal, 0.0)
        p = pg_time_dependent_quadrature(control, signal, d, 40.0)
        assert p == pytest.approx(thermal_floor(d.bath), abs=1e-12)

    def test_short_time_limit_is_floor(self):
        d = det(mu=2.0, chi=0.01)
        signal = make_exponential_mode(ModeParams(1.0, 0.0))
        control = scaled_control(signal, d.control_amplitude_scale())
        assert pg_time_dependent_quadrature(control, signal, d, 0.0) == thermal_floor(d.bath)
        assert pg_time_dependent_quadrature(control, signal, d, 1e-7) == pytest.approx(
            thermal_floor(d.bath), abs=1e-6)

    def test_matched_modes_against_simplified_form(self):
        # small-chi regime where the instantaneous-response form is valid
        d = det(mu=math.inf, chi=0.01, eta=1.0, kappa=1000.0)
        signal = make_exponential_mode(ModeParams(1.0, 0.0))
        control = scaled_control(signal, d.control_amplitude_scale())
        p = pg_time_dependent_quadrature(control, signal, d, 40.0)
        assert abs(p - pg_quantum(1.0, d)) / pg_quantum(1.0, d) < 0.01
        # independent reduction for matched modes: chi * ((1-e^-x)/x)^2, x = chi/2
        x = d.chi / 2
        reduction = d.chi * ((1 - math.exp(-x)) / x) ** 2
        assert p == pytest.approx(reduction, rel=1e-9)

    def test_rejects_negative_time(self):
        d = det()
        signal = make_exponential_mode(ModeParams(1.0, 0.0))
        with pytest.raises(ValidationError):
            pg_time_dependent_quadrature(scaled_control(signal, 1.0), signal, d, -1.0)
