"""Master-equation oracles validating the closed-form click probabilities.

Two independent numerical routes:

* the one-photon hierarchy at the atomic level: four coupled 2x2 blocks
  rho_00, rho_01, rho_10, rho_11 over the photon-number sectors of the
  input wavepacket, integrated after adiabatic elimination of the
  cavity.  Only rho_11 carries observables; P_g = <g|rho_11|g>.

* the coherently driven atom-cavity master equation on the full
  (2 x (n_max+1))-dimensional space, with thermal cavity dissipators
  and a classical displacement drive shaped like the signal.

Both are integrated with classic fixed-step fourth-order Runge-Kutta.
The generators are linear with a handful of time-dependent scalar
coefficients, so each right-hand side is one sparse matrix-vector
product against a precomputed stack of constant superoperators; this
keeps trajectories bit-reproducible and fast.

Note the displacement drive is implemented with a real prefactor,
sqrt(eta*kappa) * [xi* a - xi a^dag, rho]: the commutator bracket is
anti-Hermitian, so a real coefficient is the Hermiticity-preserving
choice, and the sign matches the input relation d<a>/dt ~ -sqrt(eta*
kappa)*xi used by the one-photon route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, IntegrationError, ValidationError
from .modes import TemporalMode
from .source import BathParams

__all__ = [
    "FockHierarchyState",
    "CavityMEState",
    "InvariantReport",
    "HierarchyTrajectory",
    "CavityTrajectory",
    "check_block_invariants",
    "integrate_fock_hierarchy",
    "integrate_driven_cavity_me",
    "dump_trajectory",
]

#: fastest generator rate times the RK4 step must stay below this
STEP_RATE_LIMIT = 0.05

HIERARCHY_TOL = 1e-8
CAVITY_TRACE_TOL = 1e-7
CAVITY_HERM_TOL = 1e-8
CAVITY_TOP_LEVEL_TOL = 1e-6

_SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e|, basis (g, e)
_SIGMA_PLUS = _SIGMA_MINUS.conj().T


def _kron_eye(op: np.ndarray, left: bool) -> np.ndarray:
    eye = np.eye(op.shape[0])
    return np.kron(op, eye) if left else np.kron(eye, op.T)


def _comm_sup(op: np.ndarray) -> np.ndarray:
    """Superoperator of [op, .] acting on row-major vec(rho)."""
    return _kron_eye(op, True) - _kron_eye(op, False)


def _diss_sup(op: np.ndarray) -> np.ndarray:
    """Lindblad dissipator D[op] on row-major vec(rho)."""
    eye = np.eye(op.shape[0])
    nop = op.conj().T @ op
    return (np.kron(op, op.conj())
            - 0.5 * (np.kron(nop, eye) + np.kron(eye, nop.T)))


@dataclass
class FockHierarchyState:
    """The four atomic blocks of the one-photon hierarchy."""

    rho00: np.ndarray
    rho01: np.ndarray
    rho10: np.ndarray
    rho11: np.ndarray

    @classmethod
    def initial(cls, bath: BathParams) -> "FockHierarchyState":
        """Diagonal blocks at the inverted thermal state, off-diagonal zero."""
        pg0 = bath.ground_floor()
        diag = np.diag([pg0, 1.0 - pg0]).astype(complex)
        zero = np.zeros((2, 2), dtype=complex)
        return cls(diag.copy(), zero.copy(), zero.copy(), diag.copy())

    def to_vector(self) -> np.ndarray:
        return np.concatenate([b.reshape(-1) for b in
                               (self.rho00, self.rho01, self.rho10, self.rho11)])

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "FockHierarchyState":
        blocks = [y[4 * i:4 * (i + 1)].reshape(2, 2).copy() for i in range(4)]
        return cls(*blocks)

    @property
    def p_g(self) -> float:
        return float(self.rho11[0, 0].real)

    @property
    def sigma_minus_01(self) -> complex:
        return complex(self.rho01[1, 0])


@dataclass
class CavityMEState:
    """Joint atom (x) truncated-cavity density matrix."""

    rho: np.ndarray
    n_max: int

    @classmethod
    def initial(cls, bath: BathParams, n_max: int) -> "CavityMEState":
        """Inverted atom (x) thermal cavity, truncated and renormalized."""
        nbar = bath.nbar
        if not math.isfinite(nbar):
            raise ValidationError("cavity oracle needs mu > 0 (finite nbar)")
        pg0 = bath.ground_floor()
        atom = np.diag([pg0, 1.0 - pg0]).astype(complex)
        n = np.arange(n_max + 1, dtype=float)
        weights = (nbar / (1.0 + nbar)) ** n if nbar > 0 else (n == 0).astype(float)
        weights = weights / weights.sum()
        return cls(np.kron(atom, np.diag(weights).astype(complex)), n_max)

    @property
    def dim_cavity(self) -> int:
        return self.n_max + 1

    @property
    def p_g(self) -> float:
        d = self.dim_cavity
        return float(np.trace(self.rho[:d, :d]).real)

    @property
    def mean_photons(self) -> float:
        d = self.dim_cavity
        occ = np.real(np.diag(self.rho))
        n = np.arange(d, dtype=float)
        return float(np.dot(n, occ[:d]) + np.dot(n, occ[d:]))

    @property
    def top_level_population(self) -> float:
        d = self.dim_cavity
        return float(self.rho[d - 1, d - 1].real + self.rho[2 * d - 1, 2 * d - 1].real)


@dataclass(frozen=True)
class InvariantReport:
    """Worst-case deviations from the state-type invariants."""

    trace_deviation: float
    hermiticity_deviation: float
    conjugate_block_deviation: float = 0.0
    top_level_population: float = 0.0

    def ok(self, trace_tol: float, herm_tol: float,
           conj_tol: float = math.inf, top_tol: float = math.inf) -> bool:
        return (self.trace_deviation <= trace_tol
                and self.hermiticity_deviation <= herm_tol
                and self.conjugate_block_deviation <= conj_tol
                and self.top_level_population <= top_tol)


def check_block_invariants(state: FockHierarchyState | CavityMEState) -> InvariantReport:
    """Evaluate the type invariants of either oracle state (diagnostic)."""
    if isinstance(state, FockHierarchyState):
        trace_dev = max(abs(np.trace(state.rho00) - 1.0), abs(np.trace(state.rho11) - 1.0))
        herm_dev = max(np.abs(state.rho00 - state.rho00.conj().T).max(),
                       np.abs(state.rho11 - state.rho11.conj().T).max())
        conj_dev = np.abs(state.rho10 - state.rho01.conj().T).max()
        return InvariantReport(float(trace_dev), float(herm_dev), float(conj_dev))
    if isinstance(state, CavityMEState):
        trace_dev = abs(np.trace(state.rho) - 1.0)
        herm_dev = np.abs(state.rho - state.rho.conj().T).max()
        return InvariantReport(float(trace_dev), float(herm_dev),
                               top_level_population=state.top_level_population)
    raise ValidationError(f"unsupported state type {type(state)!r}")


@dataclass
class HierarchyTrajectory:
    t: np.ndarray
    p_g: np.ndarray
    sigma_minus_01: np.ndarray
    final_state: FockHierarchyState
    worst: InvariantReport


@dataclass
class CavityTrajectory:
    t: np.ndarray
    p_g: np.ndarray
    mean_photons: np.ndarray
    final_state: CavityMEState
    worst: InvariantReport


def _validate_uniform_grid(t_grid: np.ndarray) -> tuple[float, int]:
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2:
        raise ConfigError("t_grid must be a 1-d array with at least two points")
    if t_grid[0] != 0.0:
        raise ConfigError("t_grid must start at 0")
    steps = np.diff(t_grid)
    if np.any(steps <= 0):
        raise ConfigError("t_grid must be strictly increasing")
    dt = float(steps[0])
    if not np.allclose(steps, dt, rtol=1e-9, atol=0.0):
        raise ConfigError("t_grid must be uniform")
    return dt, t_grid.size - 1


def _coefficient_bandwidths(coeff: np.ndarray, dt_half: float) -> float:
    """Largest relative variation rate among the coefficient series."""
    worst = 0.0
    for k in range(coeff.shape[1]):
        peak = np.abs(coeff[:, k]).max()
        if peak == 0.0:
            continue
        deriv = np.abs(np.diff(coeff[:, k])).max() / dt_half
        worst = max(worst, deriv / peak)
    return worst


def _check_step_condition(dt: float, rates: list[float]) -> None:
    fastest = max(rates, default=0.0)
    if fastest * dt > STEP_RATE_LIMIT * (1 + 1e-9):
        raise ConfigError(
            f"step {dt} too large for fastest rate {fastest}: "
            f"need dt <= {STEP_RATE_LIMIT / fastest}"
        )


def _rk4_stacked(stacked: sp.csr_matrix, n_parts: int, coeff: np.ndarray,
                 y0: np.ndarray, dt: float, n_steps: int,
                 store_every: int) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 of dy/dt = sum_k coeff_k(t) * P_k y.

    ``coeff`` holds the coefficient vectors on the half-step grid
    (2*n_steps+1, n_parts).  Returns (stored step indices, stored states).
    """
    dim = y0.size
    store_idx = list(range(0, n_steps + 1, store_every))
    if store_idx[-1] != n_steps:
        store_idx.append(n_steps)
    stored = np.empty((len(store_idx), dim), dtype=complex)
    stored[0] = y0
    y = y0.copy()
    pos = 1

    def rhs(c, yv):
        return c @ (stacked @ yv).reshape(n_parts, dim)

    h = dt
    for j in range(n_steps):
        c0 = coeff[2 * j]
        c1 = coeff[2 * j + 1]
        c2 = coeff[2 * j + 2]
        k1 = rhs(c0, y)
        k2 = rhs(c1, y + (h / 2) * k1)
        k3 = rhs(c1, y + (h / 2) * k2)
        k4 = rhs(c2, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if pos < len(store_idx) and store_idx[pos] == j + 1:
            stored[pos] = y
            pos += 1
    return np.asarray(store_idx), stored


def _signal_bandwidth(signal: TemporalMode) -> float:
    if signal.is_exponential:
        return signal.params.gamma / 2 + abs(signal.params.delta)
    return 0.0


def integrate_fock_hierarchy(control_amplitude: Callable[[np.ndarray], np.ndarray],
                             signal: TemporalMode, eta: float, kappa: float,
                             bath: BathParams, t_grid: np.ndarray,
                             store_every: int = 1) -> HierarchyTrajectory:
    """Integrate the atomic one-photon hierarchy on a uniform grid.

    The four blocks evolve under the pump-rate Lindblad part (rates
    4*(nbar+1)*I_V/kappa on D[sigma_+] and 4*nbar*I_V/kappa on
    D[sigma_-], all proportional to I_V(t)) plus the upward couplings

        drho_10 += c1(t) [rho_00, sigma_-],  drho_11 += c1(t) [rho_01, sigma_-],
        drho_01 -= c2(t) [sigma_+, rho_00],  drho_11 -= c2(t) [sigma_+, rho_10],

    with c1 = (2i*sqrt(eta/kappa)) xi V* and c2 = conj-partnered so the
    conjugate-block symmetry is exact.  Block invariants are checked at
    every stored point.
    """
    if not (0.0 < eta <= 1.0):
        raise ValidationError(f"eta must be in (0, 1], got {eta}")
    if not (math.isfinite(kappa) and kappa > 0):
        raise ValidationError(f"kappa must be finite and > 0, got {kappa}")
    nbar = bath.nbar
    if not math.isfinite(nbar):
        raise ValidationError("hierarchy oracle needs mu > 0 (finite nbar)")
    dt, n_steps = _validate_uniform_grid(t_grid)
    if store_every < 1:
        raise ValidationError("store_every must be >= 1")

    t_half = np.linspace(0.0, dt * n_steps, 2 * n_steps + 1)
    v = np.asarray(control_amplitude(t_half), dtype=complex)
    xi = signal.amplitude(t_half)
    i_v = np.abs(v) ** 2
    pump_coupling = 2.0 * math.sqrt(eta / kappa)
    c1 = 2j * math.sqrt(eta / kappa) * xi * v.conj()
    c2 = 2j * math.sqrt(eta / kappa) * xi.conj() * v
    coeff = np.stack([i_v.astype(complex), c1, c2], axis=1)

    lindblad_rate = 4.0 * i_v.max() * (2.0 * nbar + 1.0) / kappa
    rates = [lindblad_rate, pump_coupling * (np.abs(xi) * np.abs(v)).max(),
             _signal_bandwidth(signal), _coefficient_bandwidths(coeff, dt / 2)]
    _check_step_condition(dt, rates)

    l_unit = (4.0 * (nbar + 1.0) / kappa * _diss_sup(_SIGMA_PLUS)
              + 4.0 * nbar / kappa * _diss_sup(_SIGMA_MINUS))
    p_lind = np.zeros((16, 16), dtype=complex)
    for b in range(4):
        p_lind[4 * b:4 * b + 4, 4 * b:4 * b + 4] = l_unit
    # [X, sigma_-] and [sigma_+, X] as superoperators on vec(X)
    right_sm = _kron_eye(_SIGMA_MINUS, False) - _kron_eye(_SIGMA_MINUS, True)
    left_sp = _comm_sup(_SIGMA_PLUS)
    p_c1 = np.zeros((16, 16), dtype=complex)
    p_c1[8:12, 0:4] = right_sm    # rho10 <- rho00
    p_c1[12:16, 4:8] = right_sm   # rho11 <- rho01
    p_c2 = np.zeros((16, 16), dtype=complex)
    p_c2[4:8, 0:4] = -left_sp     # rho01 <- rho00
    p_c2[12:16, 8:12] = -left_sp  # rho11 <- rho10
    parts = np.stack([p_lind, p_c1, p_c2])
    stacked = sp.csr_matrix(parts.reshape(3 * 16, 16))

    y0 = FockHierarchyState.initial(bath).to_vector()
    idx, stored = _rk4_stacked(stacked, 3, coeff, y0, dt, n_steps, store_every)

    p_g = stored[:, 12].real.copy()
    sigma_minus = stored[:, 6].copy()
    worst = InvariantReport(0.0, 0.0)
    for row in stored:
        rep = check_block_invariants(FockHierarchyState.from_vector(row))
        worst = InvariantReport(
            max(worst.trace_deviation, rep.trace_deviation),
            max(worst.hermiticity_deviation, rep.hermiticity_deviation),
            max(worst.conjugate_block_deviation, rep.conjugate_block_deviation))
    if not worst.ok(HIERARCHY_TOL, HIERARCHY_TOL, HIERARCHY_TOL):
        raise IntegrationError(f"hierarchy invariants violated: {worst}")
    return HierarchyTrajectory(np.asarray(t_grid, dtype=float)[idx], p_g, sigma_minus,
                               FockHierarchyState.from_vector(stored[-1]), worst)


def integrate_driven_cavity_me(control_amplitude: Callable[[np.ndarray], np.ndarray],
                               signal: TemporalMode, eta: float, kappa: float,
                               bath: BathParams, n_max: int, t_grid: np.ndarray,
                               store_every: int = 1) -> CavityTrajectory:
    """Integrate the coherently driven atom-cavity master equation.

    Generator: -i[H_s, rho] with H_s = V a^dag sigma_+ + h.c., thermal
    cavity dissipators kappa*(nbar+1) D[a] + kappa*nbar D[a^dag], and
    the classical displacement drive sqrt(eta*kappa)*[xi* a - xi a^dag, rho].
    Raises when the truncation leaks (top cavity level above tolerance).
    """
    if not (0.0 < eta <= 1.0):
        raise ValidationError(f"eta must be in (0, 1], got {eta}")
    if not (math.isfinite(kappa) and kappa > 0):
        raise ValidationError(f"kappa must be finite and > 0, got {kappa}")
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    nbar = bath.nbar
    if not math.isfinite(nbar):
        raise ValidationError("cavity oracle needs mu > 0 (finite nbar)")
    dt, n_steps = _validate_uniform_grid(t_grid)
    if store_every < 1:
        raise ValidationError("store_every must be >= 1")

    dim_c = n_max + 1
    dim = 2 * dim_c
    a_cav = np.diag(np.sqrt(np.arange(1, dim_c)), 1).astype(complex)
    a_full = np.kron(np.eye(2), a_cav)
    raise_pair = np.kron(_SIGMA_PLUS, a_cav.conj().T)  # a^dag sigma_+

    t_half = np.linspace(0.0, dt * n_steps, 2 * n_steps + 1)
    v = np.asarray(control_amplitude(t_half), dtype=complex)
    xi = signal.amplitude(t_half)
    drive = math.sqrt(eta * kappa)
    coeff = np.stack([np.ones_like(v), v, v.conj(), xi.conj(), xi], axis=1)

    rates = [kappa * (nbar + 1.0), kappa * nbar,
             np.abs(v).max() * math.sqrt(dim_c), drive * np.abs(xi).max(),
             _signal_bandwidth(signal), _coefficient_bandwidths(coeff, dt / 2)]
    _check_step_condition(dt, rates)

    parts = np.stack([
        kappa * (nbar + 1.0) * _diss_sup(a_full) + kappa * nbar * _diss_sup(a_full.conj().T),
        -1j * _comm_sup(raise_pair),
        -1j * _comm_sup(raise_pair.conj().T),
        drive * _comm_sup(a_full),
        -drive * _comm_sup(a_full.conj().T),
    ])
    stacked = sp.csr_matrix(parts.reshape(5 * dim * dim, dim * dim))

    y0 = CavityMEState.initial(bath, n_max).rho.reshape(-1)
    idx, stored = _rk4_stacked(stacked, 5, coeff, y0, dt, n_steps, store_every)

    p_g = np.empty(len(idx))
    photons = np.empty(len(idx))
    worst = InvariantReport(0.0, 0.0)
    for i, row in enumerate(stored):
        state = CavityMEState(row.reshape(dim, dim), n_max)
        p_g[i] = state.p_g
        photons[i] = state.mean_photons
        rep = check_block_invariants(state)
        worst = InvariantReport(
            max(worst.trace_deviation, rep.trace_deviation),
            max(worst.hermiticity_deviation, rep.hermiticity_deviation),
            top_level_population=max(worst.top_level_population, rep.top_level_population))
    if worst.top_level_population > CAVITY_TOP_LEVEL_TOL:
        raise IntegrationError(
            f"top cavity level population {worst.top_level_population:.3e} exceeds "
            f"{CAVITY_TOP_LEVEL_TOL}; increase n_max beyond {n_max}")
    if not worst.ok(CAVITY_TRACE_TOL, CAVITY_HERM_TOL):
        raise IntegrationError(f"cavity invariants violated: {worst}")
    return CavityTrajectory(np.asarray(t_grid, dtype=float)[idx], p_g, photons,
                            CavityMEState(stored[-1].reshape(dim, dim), n_max), worst)


def dump_trajectory(traj: HierarchyTrajectory | CavityTrajectory, path) -> Path:
    """Write a trajectory as CSV (17 significant digits, lossless)."""
    path = Path(path)
    lines = []
    if isinstance(traj, HierarchyTrajectory):
        lines.append("t,p_g,re_sigma_minus_01,im_sigma_minus_01")
        for t, p, s in zip(traj.t, traj.p_g, traj.sigma_minus_01):
            lines.append(f"{t:.17g},{p:.17g},{s.real:.17g},{s.imag:.17g}")
    else:
        lines.append("t,p_g,mean_photons")
        for t, p, n in zip(traj.t, traj.p_g, traj.mean_photons):
            lines.append(f"{t:.17g},{p:.17g},{n:.17g}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
