"""Work, free energy, and heat exchanged in one detection trial.

Each trial either transfers one signal photon of energy hbar*omega_a
into the sensor (probability p_abs, the signal term of the click
probability) or reflects it.  In units of k_B*T the stochastic work is
therefore two-valued, w in {0, mu_a}, giving

    <W>*beta  = mu_a * p_abs
    dF*beta   = -ln(1 - p_abs*(1 - e^{-mu_a}))     (fluctuation identity)
    Q*beta    = <W>*beta - dF*beta  >= 0.

The identity <e^{-w}> = e^{-dF*beta} is exact for this distribution and
is cross-checked by Monte Carlo.  Reported per-iteration quantities are
scaled by mu_a (so <W>/mu = p_abs); at T = 0 the scaled pair is reported
in its zero-dissipation limit dF/mu = <W>/mu = p_abs, which keeps
dF -> <W> exact as the overlap approaches 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detector import DetectionModel, DetectorParams, _gamma_value
from .errors import ValidationError
from .modes import Overlap

__all__ = [
    "WorkSample",
    "ThermoSummary",
    "absorption_probability",
    "average_work",
    "free_energy_change",
    "dissipated_heat",
    "thermo_summary",
    "scaled_summary",
    "jarzynski_monte_carlo",
    "JarzynskiEstimate",
]


@dataclass(frozen=True)
class WorkSample:
    """Work of one trial in units of k_B*T: mu_a if absorbed, else 0."""

    w: float


@dataclass(frozen=True)
class ThermoSummary:
    """Per-trial averages in units of k_B*T."""

    p_abs: float
    w_avg: float
    df: float
    q: float


@dataclass(frozen=True)
class JarzynskiEstimate:
    estimate: float
    std_error: float


def _check_p(p_abs: float) -> float:
    if not (0.0 <= p_abs <= 1.0):
        raise ValidationError(f"absorption probability must be in [0, 1], got {p_abs}")
    return float(p_abs)


def _check_mu(mu_a: float) -> float:
    if not (mu_a > 0 and math.isfinite(mu_a)):
        raise ValidationError(f"mu_a must be finite and > 0, got {mu_a}")
    return float(mu_a)


def absorption_probability(model: DetectionModel, gamma_overlap: Overlap | float,
                           det: DetectorParams) -> float:
    """Probability that the signal itself is absorbed (thermal floor excluded)."""
    g = _gamma_value(gamma_overlap)
    cg = det.chi * g
    if model is DetectionModel.QUANTUM:
        return cg * det.bath.tanh_half()
    return cg * math.exp(-cg) * det.bath.tanh_half()


def average_work(p_abs: float, mu_a: float) -> float:
    """<W>*beta = mu_a * p_abs."""
    return _check_mu(mu_a) * _check_p(p_abs)


def free_energy_change(p_abs: float, mu_a: float) -> float:
    """dF*beta from the two-outcome fluctuation identity."""
    p = _check_p(p_abs)
    mu = _check_mu(mu_a)
    return -math.log1p(p * math.expm1(-mu)) if p < 1.0 else mu


def dissipated_heat(w_avg: float, df: float) -> float:
    """Q*beta = <W>*beta - dF*beta (clipped at 0 against roundoff)."""
    return max(w_avg - df, 0.0)


def thermo_summary(model: DetectionModel, gamma_overlap: Overlap | float,
                   det: DetectorParams) -> ThermoSummary:
    """All per-trial averages at finite temperature."""
    p = absorption_probability(model, gamma_overlap, det)
    w = average_work(p, det.bath.mu)
    df = free_energy_change(p, det.bath.mu)
    return ThermoSummary(p, w, df, dissipated_heat(w, df))


def scaled_summary(model: DetectionModel, gamma_overlap: Overlap | float,
                   det: DetectorParams) -> tuple[float, float, float]:
    """(<W>, dF, Q) scaled by mu_a; well defined at T = 0.

    Finite mu: (p_abs, dF*beta/mu, Q*beta/mu).  At mu = inf the work
    distribution degenerates and the scaled pair is reported in its
    zero-dissipation limit (p_abs, p_abs, 0).
    """
    p = absorption_probability(model, gamma_overlap, det)
    mu = det.bath.mu
    if math.isinf(mu):
        return p, p, 0.0
    df = free_energy_change(p, mu) / mu
    return p, df, max(p - df, 0.0)


def jarzynski_monte_carlo(p_abs: float, mu_a: float, trials: int,
                          rng: np.random.Generator) -> JarzynskiEstimate:
    """Monte Carlo estimate of -ln <e^{-w}> with a delta-method error bar.

    Draws ``trials`` two-valued work samples; deterministic given the
    generator state.  The estimate converges to free_energy_change.
    """
    p = _check_p(p_abs)
    mu = _check_mu(mu_a)
    if trials < 1000:
        raise ValidationError(f"trials must be >= 1000, got {trials}")
    absorbed = rng.random(trials) < p
    values = np.where(absorbed, math.exp(-mu), 1.0)
    mean = float(values.mean())
    spread = float(values.std(ddof=1))
    return JarzynskiEstimate(-math.log(mean), spread / (math.sqrt(trials) * mean))
