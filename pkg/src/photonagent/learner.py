"""The agent's software: click sampling, gradient estimates, descent loop.

Each iteration the agent fires N probe pulses at its current parameter
guess, records the binary error outcomes x_j, and estimates the mean
error rate x_bar = sum x_j / N.  Gradients of the error probability are
taken in normalized coordinates (each parameter mapped affinely onto
[0, 1] by its bounds), either empirically -- symmetric finite
differences of sampled error rates, two probe runs per coordinate -- or
analytically through the chain rule on the closed-form overlap.  The
update is plain projected gradient descent,

    f_norm <- clip(f_norm - L * grad P_e, [0, 1]^2),

optionally flipped to ascent for comparison runs.  Convergence is
tracked by the normalized Euclidean distance to the true parameters.
All randomness flows through per-(iteration, probe) substreams, so runs
are bit-reproducible for any execution order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .detector import DetectionModel, DetectorParams, error_prob
from .errors import ValidationError
from .modes import ModeParams, overlap_exponential_closed_form, overlap_gradient_exponential
from .thermo import scaled_summary

__all__ = [
    "GradientBackend",
    "ParamBounds",
    "AgentConfig",
    "WorldConfig",
    "LearningRecord",
    "sample_error_rate",
    "normalize",
    "denormalize",
    "estimate_gradient",
    "gd_step",
    "normalized_distance",
    "run_learning",
]


class GradientBackend(enum.Enum):
    EMPIRICAL = "empirical"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class ParamBounds:
    """Per-parameter (lo, hi) boxes for (gamma, delta)."""

    gamma: tuple[float, float]
    delta: tuple[float, float]

    def __post_init__(self) -> None:
        for name, (lo, hi) in (("gamma", self.gamma), ("delta", self.delta)):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValidationError(f"{name} bounds must be finite with lo < hi")
        if self.gamma[0] <= 0:
            raise ValidationError("gamma lower bound must be > 0")

    @property
    def lows(self) -> np.ndarray:
        return np.array([self.gamma[0], self.delta[0]])

    @property
    def widths(self) -> np.ndarray:
        return np.array([self.gamma[1] - self.gamma[0], self.delta[1] - self.delta[0]])

    def contains(self, f: ModeParams) -> bool:
        return (self.gamma[0] <= f.gamma <= self.gamma[1]
                and self.delta[0] <= f.delta <= self.delta[1])


@dataclass(frozen=True)
class AgentConfig:
    """Hyperparameters of one learning agent."""

    kind: DetectionModel
    f0: ModeParams
    bounds: ParamBounds
    learning_rate: float = 0.009
    shots: int = 1000
    fd_step: float = 0.01
    max_iterations: int = 600
    gradient_backend: GradientBackend = GradientBackend.ANALYTIC
    seconds_per_shot: float | None = None
    gradient_ascent: bool = False  # run the update with flipped sign, for comparison

    def __post_init__(self) -> None:
        if not self.bounds.contains(self.f0):
            raise ValidationError(f"f0 {self.f0} lies outside the bounds")
        if not (self.learning_rate >= 0 and math.isfinite(self.learning_rate)):
            raise ValidationError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.shots < 1:
            raise ValidationError(f"shots must be >= 1, got {self.shots}")
        if not (0 < self.fd_step < 0.5):
            raise ValidationError(f"fd_step must be in (0, 0.5), got {self.fd_step}")
        if self.max_iterations < 0:
            raise ValidationError("max_iterations must be >= 0")
        if self.seconds_per_shot is not None:
            # acquisition-rate bound: one update per N*s seconds
            limit = 1.0 / (self.shots * self.seconds_per_shot)
            if self.learning_rate >= limit:
                raise ValidationError(
                    f"learning_rate {self.learning_rate} exceeds the acquisition "
                    f"bound 1/(N*s) = {limit}")


@dataclass(frozen=True)
class WorldConfig:
    """The environment: true mode parameters and the shared sensor."""

    f_true: ModeParams
    detector: DetectorParams


@dataclass(frozen=True)
class LearningRecord:
    """State of one iteration, in the exact column order of the CSV output."""

    iteration: int
    gamma: float
    delta: float
    gamma_norm: float
    delta_norm: float
    dist_norm: float
    x_bar: float
    p_e_model: float
    overlap: float
    w_avg_scaled: float
    df_scaled: float
    q_scaled: float


def sample_error_rate(p_e: float, n: int, rng: np.random.Generator) -> float:
    """Mean of n Bernoulli(p_e) error bits; a multiple of 1/n."""
    if not (0.0 <= p_e <= 1.0):
        raise ValidationError(f"p_e must be in [0, 1], got {p_e}")
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    return float((rng.random(n) < p_e).mean())


def normalize(f: ModeParams, bounds: ParamBounds) -> np.ndarray:
    """Map parameters into the unit square by their bounds."""
    if not bounds.contains(f):
        raise ValidationError(f"{f} lies outside the bounds")
    return (f.as_array() - bounds.lows) / bounds.widths


def denormalize(point, bounds: ParamBounds) -> ModeParams:
    point = np.asarray(point, dtype=float)
    if np.any(point < 0) or np.any(point > 1):
        raise ValidationError(f"normalized point {point} outside [0, 1]^2")
    phys = bounds.lows + point * bounds.widths
    return ModeParams(float(phys[0]), float(phys[1]))


def model_error_prob(kind: DetectionModel, f: ModeParams, world: WorldConfig) -> float:
    """Exact error probability of the world's sensor at guess f."""
    gam = overlap_exponential_closed_form(f, world.f_true)
    return error_prob(kind, gam, world.detector)


def estimate_gradient(f: ModeParams, agent: AgentConfig, world: WorldConfig,
                      probe_stream: Callable[[int], np.random.Generator] | None = None,
                      ) -> np.ndarray:
    """Gradient of the error probability in normalized coordinates.

    Empirical backend: central differences of sampled error rates at
    f_norm +- fd_step per coordinate (probes clamped to [0, 1]; four
    shot runs total), consuming probe_stream(0..3).  Analytic backend:
    chain rule through the closed-form overlap, scaled by the bound
    widths.
    """
    bounds = agent.bounds
    if agent.gradient_backend is GradientBackend.ANALYTIC:
        d_gamma, d_delta = overlap_gradient_exponential(f, world.f_true)
        gam = overlap_exponential_closed_form(f, world.f_true).gamma_overlap
        th = world.detector.bath.tanh_half()
        cg = world.detector.chi * gam
        if agent.kind is DetectionModel.QUANTUM:
            dpg_dgamma = world.detector.chi * th
        else:
            dpg_dgamma = world.detector.chi * th * math.exp(-cg) * (1.0 - cg)
        # dP_e/df = -dP_g/dGamma * dGamma/df, then to normalized coordinates
        return -dpg_dgamma * np.array([d_gamma, d_delta]) * bounds.widths

    if probe_stream is None:
        raise ValidationError("empirical gradient estimation needs probe streams")
    f_norm = normalize(f, bounds)
    grad = np.zeros(2)
    for k in range(2):
        rates = []
        for sgn_idx, sign in enumerate((1.0, -1.0)):
            point = f_norm.copy()
            point[k] = min(1.0, max(0.0, point[k] + sign * agent.fd_step))
            p_e = model_error_prob(agent.kind, denormalize(point, bounds), world)
            rng = probe_stream(2 * k + sgn_idx)
            rates.append(sample_error_rate(p_e, agent.shots, rng))
        grad[k] = (rates[0] - rates[1]) / (2.0 * agent.fd_step)
    return grad


def gd_step(f_norm: np.ndarray, gradient: np.ndarray, learning_rate: float,
            ascend: bool = False) -> np.ndarray:
    """One projected gradient step, clamped to the unit square."""
    sign = 1.0 if ascend else -1.0
    return np.clip(np.asarray(f_norm) + sign * learning_rate * np.asarray(gradient),
                   0.0, 1.0)


def normalized_distance(f: ModeParams, f_true: ModeParams, bounds: ParamBounds) -> float:
    """Euclidean distance in normalized coordinates, scaled into [0, 1]."""
    diff = normalize(f, bounds) - normalize(f_true, bounds)
    return float(np.linalg.norm(diff) / math.sqrt(diff.size))


def run_learning(agent: AgentConfig, world: WorldConfig, seed: int) -> list[LearningRecord]:
    """Full learning loop; returns one record per visited iterate.

    Record i describes the parameters before update i; the list has
    max_iterations + 1 entries so the final iterate is included.  The
    trajectory is deterministic given (configs, seed); with the
    analytic backend it is independent of the seed entirely (only the
    reported x_bar samples consume randomness).
    """
    from .harness.rng import RngStreamKey, stream_from_key  # local: avoids package cycle

    if not agent.bounds.contains(world.f_true):
        raise ValidationError("f_true lies outside the agent's bounds (unlearnable)")
    det = world.detector
    f_norm = normalize(agent.f0, agent.bounds)
    records: list[LearningRecord] = []
    for i in range(agent.max_iterations + 1):
        f = denormalize(f_norm, agent.bounds)
        gam = overlap_exponential_closed_form(f, world.f_true).gamma_overlap
        p_e = error_prob(agent.kind, gam, det)
        x_bar = sample_error_rate(
            p_e, agent.shots,
            stream_from_key(RngStreamKey(seed, "error-rate", i, 0)))
        w_s, df_s, q_s = scaled_summary(agent.kind, gam, det)
        records.append(LearningRecord(
            iteration=i,
            gamma=f.gamma, delta=f.delta,
            gamma_norm=float(f_norm[0]), delta_norm=float(f_norm[1]),
            dist_norm=normalized_distance(f, world.f_true, agent.bounds),
            x_bar=x_bar, p_e_model=p_e, overlap=gam,
            w_avg_scaled=w_s, df_scaled=df_s, q_scaled=q_s))
        if i == agent.max_iterations:
            break
        def probe_stream(probe: int, _i=i) -> np.random.Generator:
            return stream_from_key(RngStreamKey(seed, "gradient", _i, probe))
        grad = estimate_gradient(f, agent, world, probe_stream)
        f_norm = gd_step(f_norm, grad, agent.learning_rate, agent.gradient_ascent)
    return records
