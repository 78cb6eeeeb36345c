"""Actuator physics: a driven atom emitting shaped pulses into a cavity.

A classical control pulse E(t) pumps the g -> e transition of the
emitter atom through a far-detuned Raman process; the emitted photon
leaves through the cavity (decay rate kappa) into the output mode.
After adiabatic elimination of the cavity the atom relaxes at rate
4*I(t)*(2*nbar+1)/kappa toward the pump-inverted steady state, where
I(t) = |E(t)|^2 and nbar is the thermal photon number of the bath.

Ground-state population along the pulse:

    P_g(t) = 1/(1+e^mu) + tanh(mu/2) * exp(-tau(t)),
    tau(t) = (4*(2*nbar+1)/kappa) * integral_0^t I(t') dt',

which starts from the thermal value 1/(1+e^-mu) and empties completely
at zero temperature (perfect single-photon emission).  The polarization
is sigma_z = 1 - 2*P_g and the emitted flux nbar + (4I/kappa)*sigma_z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson

from .errors import ValidationError
from .modes import TemporalMode

__all__ = [
    "BathParams",
    "ControlEnvelope",
    "tau_source",
    "ground_population_source",
    "polarization",
    "output_flux",
    "mean_output_field",
]

_SCALAR_GRID_POINTS = 4097


@dataclass(frozen=True)
class BathParams:
    """Thermal bath at Boltzmann factor mu = hbar*omega/(k_B*T) >= 0.

    mu = math.inf encodes T = 0 exactly (nbar = 0); mu = 0 is the
    infinite-temperature limit (nbar diverges).
    """

    mu: float

    def __post_init__(self) -> None:
        if math.isnan(self.mu) or self.mu < 0:
            raise ValidationError(f"mu must be >= 0 (inf allowed), got {self.mu}")

    @property
    def nbar(self) -> float:
        """Mean thermal photon number 1/(e^mu - 1); 0 at T = 0."""
        if math.isinf(self.mu):
            return 0.0
        if self.mu == 0:
            return math.inf
        return 1.0 / math.expm1(self.mu)

    def tanh_half(self) -> float:
        """tanh(mu/2) = 1/(2*nbar+1), the equilibrium polarization magnitude."""
        return 1.0 if math.isinf(self.mu) else math.tanh(self.mu / 2)

    def ground_floor(self) -> float:
        """Equilibrium weight 1/(1+e^mu) = nbar/(2*nbar+1)."""
        return 0.0 if math.isinf(self.mu) else 1.0 / (1.0 + math.exp(self.mu))


class ControlEnvelope:
    """Classical drive amplitude E(t); the intensity I(t) = |E(t)|^2."""

    def __init__(self, amplitude_fn: Callable[[np.ndarray], np.ndarray]):
        self._amplitude_fn = amplitude_fn

    @classmethod
    def from_mode(cls, mode: TemporalMode, scale: float = 1.0) -> "ControlEnvelope":
        """Envelope proportional to a unit-norm temporal mode."""
        return cls(lambda t: scale * mode.amplitude(t))

    @classmethod
    def constant(cls, value: complex) -> "ControlEnvelope":
        """Flat drive switched on at t = 0."""
        def fn(t):
            t = np.asarray(t, dtype=float)
            return np.where(t >= 0, value, 0.0).astype(complex)
        return cls(fn)

    @classmethod
    def zero(cls) -> "ControlEnvelope":
        return cls.constant(0.0)

    def amplitude(self, t) -> np.ndarray:
        return np.asarray(self._amplitude_fn(np.asarray(t, dtype=float)), dtype=complex)

    def intensity(self, t) -> np.ndarray:
        return np.abs(self.amplitude(t)) ** 2


def _validate_times(t, kappa: float) -> np.ndarray:
    if kappa <= 0 or not math.isfinite(kappa):
        raise ValidationError(f"kappa must be finite and > 0, got {kappa}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise ValidationError("times must be finite and >= 0")
    return t_arr


def tau_source(envelope: ControlEnvelope, bath: BathParams, kappa: float, t):
    """Dimensionless relaxation exponent of the driven emitter.

    tau(t) = (4*(2*nbar+1)/kappa) * integral_0^t I(t') dt', evaluated by
    cumulative trapezoid.  Scalar ``t`` integrates on an internal
    uniform grid; an array ``t`` (nondecreasing, starting at 0) is used
    as the quadrature grid itself.  Monotonically nondecreasing in t.
    """
    t_arr = _validate_times(t, kappa)
    scalar = np.isscalar(t) or getattr(t, "ndim", 0) == 0
    if scalar:
        if t_arr[0] == 0.0:
            return 0.0
        grid = np.linspace(0.0, t_arr[0], _SCALAR_GRID_POINTS)
    else:
        if t_arr[0] != 0.0 or np.any(np.diff(t_arr) < 0):
            raise ValidationError("time grid must be nondecreasing and start at 0")
        grid = t_arr
    pref = 4.0 * (2.0 * bath.nbar + 1.0) / kappa
    if not math.isfinite(pref):
        raise ValidationError("tau is undefined at infinite temperature (mu = 0)")
    cum = cumulative_trapezoid(envelope.intensity(grid), grid, initial=0.0)
    tau = pref * cum
    return float(tau[-1]) if scalar else tau


def ground_population_source(envelope: ControlEnvelope, bath: BathParams,
                             kappa: float, t):
    """Closed-form ground-state population of the emitter.

    P_g(t) = 1/(1+e^mu) + tanh(mu/2)*exp(-tau(t)); equals the thermal
    initial value (1+e^-mu)^-1 at t = 0 and decays to the inverted
    steady state nbar/(2*nbar+1) for long pulses.
    """
    tau = tau_source(envelope, bath, kappa, t)
    return bath.ground_floor() + bath.tanh_half() * np.exp(-np.asarray(tau))


def polarization(envelope: ControlEnvelope, bath: BathParams, kappa: float, t):
    """Mean polarization sigma_z = 1 - 2*P_g(t); tends to tanh(mu/2)."""
    return 1.0 - 2.0 * ground_population_source(envelope, bath, kappa, t)


def output_flux(envelope: ControlEnvelope, bath: BathParams, kappa: float, t):
    """Mean photon flux nbar + (4*I(t)/kappa)*sigma_z(t) in the output mode."""
    t_arr = _validate_times(t, kappa)
    sz = polarization(envelope, bath, kappa, t)
    flux = bath.nbar + 4.0 * envelope.intensity(t_arr) / kappa * sz
    return float(flux[0]) if np.isscalar(t) or getattr(t, "ndim", 0) == 0 else flux


def mean_output_field(envelope: ControlEnvelope,
                      sigma_plus_traj: Callable[[np.ndarray], np.ndarray],
                      kappa: float, t: float, n_steps: int = 4096) -> complex:
    """Mean output amplitude, the cavity response convolved with the drive.

    <a_o(t)> = -i*sqrt(kappa) * integral_0^t exp(kappa*(t'-t)/2)
               * E(t') * <sigma_+(t')> dt'.
    """
    t_arr = _validate_times(t, kappa)
    t_end = float(t_arr[0])
    if t_end == 0.0:
        return 0.0 + 0.0j
    n_steps += n_steps % 2
    grid = np.linspace(0.0, t_end, n_steps + 1)
    integrand = (np.exp(kappa * (grid - t_end) / 2.0) * envelope.amplitude(grid)
                 * np.asarray(sigma_plus_traj(grid), dtype=complex))
    return complex(-1j * math.sqrt(kappa) * simpson(integrand, dx=grid[1] - grid[0]))
