"""Detection probabilities of the single-photon sensor.

The sensor is the emitter run in reverse: a population-inverted atom
(negative-temperature ready state) absorbs the incoming pulse when the
shape of its control field V matches the signal.  A click is the atom
found in the ground state.  With the control factored as V = A*v(t)
(v unit-norm) all closed forms depend on the mode overlap Gamma and the
dimensionless absorption efficiency chi, which plays the role of
4*eta*A^2/kappa:

    quantum (one-photon) input:
        P_g = nbar/(1+2*nbar) + chi*Gamma*tanh(mu/2)
    classical (mean photon number 1 coherent) input:
        P_g = nbar/(1+2*nbar) + chi*Gamma*exp(-chi*Gamma)*tanh(mu/2)

The first term is the thermal floor (a bath photon flips the atom); the
second is absorption of the signal itself.  The extra exp(-chi*Gamma)
penalty is the intensity noise of the coherent probe.  The general
time-dependent solution before the instantaneous-response limit is also
provided by quadrature for oracle cross-checks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .errors import ValidationError
from .modes import Overlap, TemporalMode
from .source import BathParams

__all__ = [
    "DetectionModel",
    "DetectorParams",
    "thermal_floor",
    "pg_quantum",
    "pg_classical",
    "error_prob",
    "pg_time_dependent_quadrature",
    "scaled_control",
]


class DetectionModel(enum.Enum):
    """Which probe the agent sends: one-photon pulses or weak coherent ones."""

    QUANTUM = "quantum"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class DetectorParams:
    """Sensor parameters.

    ``chi`` is the absorption efficiency entering the closed forms;
    ``eta`` and ``kappa`` enter only the time-resolved/oracle routes.
    The bath's mu sets the inversion of the ready state: the vacuum
    ground-state floor is nbar/(2*nbar+1) = 1/(1+e^mu).
    """

    kappa: float
    bath: BathParams
    chi: float = 1.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 < self.eta <= 1.0):
            raise ValidationError(f"eta must be in (0, 1], got {self.eta}")
        if not (0.0 < self.chi <= 1.0):
            raise ValidationError(f"chi must be in (0, 1], got {self.chi}")
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ValidationError(f"kappa must be finite and > 0, got {self.kappa}")

    def control_amplitude_scale(self) -> float:
        """Drive amplitude A with chi = 4*eta*A^2/kappa."""
        return math.sqrt(self.chi * self.kappa / (4.0 * self.eta))


def _gamma_value(gamma_overlap: Overlap | float) -> float:
    g = gamma_overlap.gamma_overlap if isinstance(gamma_overlap, Overlap) else float(gamma_overlap)
    if not (0.0 <= g <= 1.0 + 1e-12):
        raise ValidationError(f"overlap must lie in [0, 1], got {g}")
    return min(g, 1.0)


def thermal_floor(bath: BathParams) -> float:
    """Ground-state probability under vacuum input, nbar/(1+2*nbar)."""
    return bath.ground_floor()


def pg_quantum(gamma_overlap: Overlap | float, det: DetectorParams) -> float:
    """Click probability for a single-photon probe."""
    g = _gamma_value(gamma_overlap)
    p = thermal_floor(det.bath) + det.chi * g * det.bath.tanh_half()
    if p > 1.0 + 1e-12:
        raise ValidationError(f"probability {p} > 1; chi={det.chi} is inconsistent")
    return min(p, 1.0)


def pg_classical(gamma_overlap: Overlap | float, det: DetectorParams) -> float:
    """Click probability for a mean-photon-number-1 coherent probe."""
    g = _gamma_value(gamma_overlap)
    cg = det.chi * g
    p = thermal_floor(det.bath) + cg * math.exp(-cg) * det.bath.tanh_half()
    if p > 1.0 + 1e-12:
        raise ValidationError(f"probability {p} > 1; chi={det.chi} is inconsistent")
    return min(p, 1.0)


def error_prob(model: DetectionModel, gamma_overlap: Overlap | float,
               det: DetectorParams) -> float:
    """No-click (excited state) probability, 1 - P_g."""
    if model is DetectionModel.QUANTUM:
        return 1.0 - pg_quantum(gamma_overlap, det)
    return 1.0 - pg_classical(gamma_overlap, det)


def scaled_control(mode: TemporalMode, amplitude: float) -> Callable[[np.ndarray], np.ndarray]:
    """Control field V(t) = amplitude * v(t) as a vectorized callable."""
    return lambda t: amplitude * mode.amplitude(t)


def pg_time_dependent_quadrature(control_amplitude: Callable[[np.ndarray], np.ndarray],
                                 signal: TemporalMode, det: DetectorParams,
                                 t: float, n_steps: int = 2 ** 14) -> float:
    """General time-dependent click probability, before the large-kappa limit.

    P_g(t) = ( nbar + (4*eta/kappa) * | integral_0^t e^{tau'-tau} V xi* dt' |^2 )
             / (2*nbar + 1),
    with the coherence exponent tau(t) = (2*(2*nbar+1)/kappa) * integral I_V.
    Both integrals run on a shared uniform grid (cumulative Simpson for
    tau, Simpson for the inner product).
    """
    if not (math.isfinite(t) and t >= 0):
        raise ValidationError(f"t must be finite and >= 0, got {t}")
    nbar = det.bath.nbar
    if not math.isfinite(nbar):
        raise ValidationError("quadrature undefined at infinite temperature (mu = 0)")
    if n_steps < 2:
        raise ValidationError("n_steps must be >= 2")
    if t == 0.0:
        return thermal_floor(det.bath)
    n_steps += n_steps % 2
    grid = np.linspace(0.0, t, n_steps + 1)
    v = np.asarray(control_amplitude(grid), dtype=complex)
    xi = signal.amplitude(grid)
    tau = (2.0 * (2.0 * nbar + 1.0) / det.kappa) * cumulative_simpson(
        np.abs(v) ** 2, dx=grid[1] - grid[0], initial=0.0)
    inner = simpson(np.exp(tau - tau[-1]) * v * np.conj(xi), dx=grid[1] - grid[0])
    p = (nbar + 4.0 * det.eta / det.kappa * float(abs(inner)) ** 2) / (2.0 * nbar + 1.0)
    return min(max(p, 0.0), 1.0)
