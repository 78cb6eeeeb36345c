"""Experiment configuration: sectioned key=value files, fail-closed.

The format is INI-style (configparser syntax).  Every key has a
documented default; unknown sections or keys are errors.  The full
grammar with defaults:

    [world]
    gamma_t = 1.0            # true linewidth (sets the unit system)
    delta_t = 2.0            # true detuning

    [detector]
    chi = 1.0                # absorption efficiency of the closed forms
    eta = 1.0                # quantum efficiency (oracle routes)
    kappa = 1000.0           # cavity decay rate (oracle routes)

    [agent]
    kinds = quantum, classical
    gamma0 = 3.0             # initial guess
    delta0 = -1.0
    gamma_min = 0.1
    gamma_max = 5.0
    delta_min = -5.0
    delta_max = 5.0
    learning_rate = 0.009
    shots = 1000
    fd_step = 0.01
    gradient_backend = analytic   # or: empirical
    gradient_ascent = false       # flip the update sign (comparison runs)

    [temperatures]
    mu = inf, 2, 1           # sensor Boltzmann factors, inf = T = 0

    [run]
    iterations = 600
    seed = 42
    output_dir = out

    [oracle]
    kappa = 100, 1000, 10000      # sweep for the one-photon oracle
    kappa_classical = 100, 1000   # sweep for the cavity oracle (costlier)
    kappa_ref = 1000.0            # kappa at which chi below is defined
    chi = 0.01                    # sweeps hold the drive amplitude fixed,
                                  # so chi scales as kappa_ref/kappa
    n_max = 6                     # cavity truncation
    t_max = 20.0                  # integration horizon (units 1/gamma_t)
    steps = 4096                  # grid size for hierarchy and quadrature
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..detector import DetectionModel, DetectorParams
from ..errors import ConfigError
from ..learner import AgentConfig, GradientBackend, ModeParams, ParamBounds, WorldConfig
from ..source import BathParams

__all__ = ["ExperimentConfig", "OracleSettings", "RunSettings", "load_config",
           "default_config", "parse_mu"]


@dataclass(frozen=True)
class RunSettings:
    iterations: int = 600
    seed: int = 42
    output_dir: str = "out"


@dataclass(frozen=True)
class OracleSettings:
    kappa_sweep: tuple[float, ...] = (100.0, 1000.0, 10000.0)
    kappa_sweep_classical: tuple[float, ...] = (100.0, 1000.0)
    kappa_ref: float = 1000.0
    chi: float = 0.01
    n_max: int = 6
    t_max: float = 20.0
    steps: int = 4096


@dataclass(frozen=True)
class ExperimentConfig:
    world: WorldConfig
    agents: tuple[AgentConfig, ...]
    temperatures: tuple[float, ...] = (math.inf, 2.0, 1.0)
    run: RunSettings = field(default_factory=RunSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)

    def echo(self) -> dict:
        """Plain-dict snapshot of the configuration for the manifest."""
        a0 = self.agents[0]
        return {
            "world": {"gamma_t": self.world.f_true.gamma,
                      "delta_t": self.world.f_true.delta},
            "detector": {"chi": self.world.detector.chi,
                         "eta": self.world.detector.eta,
                         "kappa": self.world.detector.kappa},
            "agent": {
                "kinds": [a.kind.value for a in self.agents],
                "gamma0": a0.f0.gamma, "delta0": a0.f0.delta,
                "gamma_min": a0.bounds.gamma[0], "gamma_max": a0.bounds.gamma[1],
                "delta_min": a0.bounds.delta[0], "delta_max": a0.bounds.delta[1],
                "learning_rate": a0.learning_rate, "shots": a0.shots,
                "fd_step": a0.fd_step,
                "gradient_backend": a0.gradient_backend.value,
                "gradient_ascent": a0.gradient_ascent,
            },
            "temperatures": [format_mu(m) for m in self.temperatures],
            "run": {"iterations": self.run.iterations, "seed": self.run.seed,
                    "output_dir": self.run.output_dir},
            "oracle": {"kappa": list(self.oracle.kappa_sweep),
                       "kappa_classical": list(self.oracle.kappa_sweep_classical),
                       "kappa_ref": self.oracle.kappa_ref, "chi": self.oracle.chi,
                       "n_max": self.oracle.n_max, "t_max": self.oracle.t_max,
                       "steps": self.oracle.steps},
        }


_DEFAULTS: dict[str, dict[str, str]] = {
    "world": {"gamma_t": "1.0", "delta_t": "2.0"},
    "detector": {"chi": "1.0", "eta": "1.0", "kappa": "1000.0"},
    "agent": {
        "kinds": "quantum, classical",
        "gamma0": "3.0", "delta0": "-1.0",
        "gamma_min": "0.1", "gamma_max": "5.0",
        "delta_min": "-5.0", "delta_max": "5.0",
        "learning_rate": "0.009", "shots": "1000", "fd_step": "0.01",
        "gradient_backend": "analytic", "gradient_ascent": "false",
    },
    "temperatures": {"mu": "inf, 2, 1"},
    "run": {"iterations": "600", "seed": "42", "output_dir": "out"},
    "oracle": {
        "kappa": "100, 1000, 10000", "kappa_classical": "100, 1000",
        "kappa_ref": "1000.0", "chi": "0.01", "n_max": "6",
        "t_max": "20.0", "steps": "4096",
    },
}


def parse_mu(text: str) -> float:
    text = text.strip().lower()
    if text in ("inf", "infinity"):
        return math.inf
    try:
        value = float(text)
    except ValueError as exc:
        raise ConfigError(f"temperatures.mu: cannot parse {text!r}") from exc
    if math.isnan(value) or value < 0:
        raise ConfigError(f"temperatures.mu: must be >= 0 or inf, got {text!r}")
    return value


def format_mu(mu: float) -> str:
    if math.isinf(mu):
        return "inf"
    return f"{mu:g}"


def _to_float(section: str, key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: expected a number, got {text!r}") from exc
    if math.isnan(value):
        raise ConfigError(f"{section}.{key}: NaN is not allowed")
    return value


def _to_int(section: str, key: str, text: str) -> int:
    try:
        return int(text, 0)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: expected an integer, got {text!r}") from exc


def _to_bool(section: str, key: str, text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{section}.{key}: expected a boolean, got {text!r}")


def _to_float_list(section: str, key: str, text: str) -> tuple[float, ...]:
    items = [s for s in (part.strip() for part in text.split(",")) if s]
    if not items:
        raise ConfigError(f"{section}.{key}: expected a comma-separated list")
    return tuple(_to_float(section, key, s) for s in items)


def _build(values: dict[str, dict[str, str]]) -> ExperimentConfig:
    def get(section: str, key: str) -> str:
        return values[section][key]

    def err(section: str, key: str, exc: Exception) -> ConfigError:
        return ConfigError(f"{section}.{key}: {exc}")

    try:
        f_true = ModeParams(_to_float("world", "gamma_t", get("world", "gamma_t")),
                            _to_float("world", "delta_t", get("world", "delta_t")))
    except ConfigError:
        raise
    except Exception as exc:
        raise err("world", "gamma_t", exc) from exc

    temperatures = tuple(parse_mu(s) for s in get("temperatures", "mu").split(","))
    if not temperatures:
        raise ConfigError("temperatures.mu: empty list")

    try:
        detector = DetectorParams(
            kappa=_to_float("detector", "kappa", get("detector", "kappa")),
            bath=BathParams(temperatures[0]),
            chi=_to_float("detector", "chi", get("detector", "chi")),
            eta=_to_float("detector", "eta", get("detector", "eta")))
    except ConfigError:
        raise
    except Exception as exc:
        raise err("detector", "chi/eta/kappa", exc) from exc

    run = RunSettings(
        iterations=_to_int("run", "iterations", get("run", "iterations")),
        seed=_to_int("run", "seed", get("run", "seed")),
        output_dir=get("run", "output_dir"))
    if run.iterations < 0:
        raise ConfigError("run.iterations: must be >= 0")
    if not (0 <= run.seed < 1 << 64):
        raise ConfigError("run.seed: must fit in an unsigned 64-bit integer")

    kind_names = [s.strip().lower() for s in get("agent", "kinds").split(",") if s.strip()]
    kinds = []
    for name in kind_names:
        try:
            kinds.append(DetectionModel(name))
        except ValueError as exc:
            raise ConfigError(f"agent.kinds: unknown kind {name!r}") from exc
    if not kinds:
        raise ConfigError("agent.kinds: empty list")

    backend_name = get("agent", "gradient_backend").strip().lower()
    try:
        backend = GradientBackend(backend_name)
    except ValueError as exc:
        raise ConfigError(f"agent.gradient_backend: unknown backend {backend_name!r}") from exc

    try:
        bounds = ParamBounds(
            gamma=(_to_float("agent", "gamma_min", get("agent", "gamma_min")),
                   _to_float("agent", "gamma_max", get("agent", "gamma_max"))),
            delta=(_to_float("agent", "delta_min", get("agent", "delta_min")),
                   _to_float("agent", "delta_max", get("agent", "delta_max"))))
        f0 = ModeParams(_to_float("agent", "gamma0", get("agent", "gamma0")),
                        _to_float("agent", "delta0", get("agent", "delta0")))
        agents = tuple(
            AgentConfig(
                kind=kind, f0=f0, bounds=bounds,
                learning_rate=_to_float("agent", "learning_rate",
                                        get("agent", "learning_rate")),
                shots=_to_int("agent", "shots", get("agent", "shots")),
                fd_step=_to_float("agent", "fd_step", get("agent", "fd_step")),
                max_iterations=run.iterations,
                gradient_backend=backend,
                gradient_ascent=_to_bool("agent", "gradient_ascent",
                                         get("agent", "gradient_ascent")))
            for kind in kinds)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"agent: {exc}") from exc

    world = WorldConfig(f_true=f_true, detector=detector)
    if not bounds.contains(f_true):
        raise ConfigError("world.gamma_t/delta_t: true parameters outside agent bounds")

    oracle = OracleSettings(
        kappa_sweep=_to_float_list("oracle", "kappa", get("oracle", "kappa")),
        kappa_sweep_classical=_to_float_list("oracle", "kappa_classical",
                                             get("oracle", "kappa_classical")),
        kappa_ref=_to_float("oracle", "kappa_ref", get("oracle", "kappa_ref")),
        chi=_to_float("oracle", "chi", get("oracle", "chi")),
        n_max=_to_int("oracle", "n_max", get("oracle", "n_max")),
        t_max=_to_float("oracle", "t_max", get("oracle", "t_max")),
        steps=_to_int("oracle", "steps", get("oracle", "steps")))
    for kappa in oracle.kappa_sweep + oracle.kappa_sweep_classical + (oracle.kappa_ref,):
        if kappa <= 0:
            raise ConfigError("oracle.kappa: all values must be > 0")
    if not (0 < oracle.chi <= 1):
        raise ConfigError("oracle.chi: must be in (0, 1]")
    if oracle.n_max < 1:
        raise ConfigError("oracle.n_max: must be >= 1")
    if oracle.t_max <= 0:
        raise ConfigError("oracle.t_max: must be > 0")
    if oracle.steps < 16:
        raise ConfigError("oracle.steps: must be >= 16")

    return ExperimentConfig(world=world, agents=agents, temperatures=temperatures,
                            run=run, oracle=oracle)


def default_config(seed: int | None = None, output_dir: str | None = None) -> ExperimentConfig:
    """The documented defaults, optionally overriding seed and output dir."""
    values = {sec: dict(keys) for sec, keys in _DEFAULTS.items()}
    if seed is not None:
        values["run"]["seed"] = str(seed)
    if output_dir is not None:
        values["run"]["output_dir"] = output_dir
    return _build(values)


def load_config(path) -> ExperimentConfig:
    """Parse and validate a configuration file; unknown keys are errors."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None,
                                       inline_comment_prefixes=("#", ";"))
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    values = {sec: dict(keys) for sec, keys in _DEFAULTS.items()}
    unknown: list[str] = []
    for section in parser.sections():
        if section not in values:
            unknown.extend(f"{section}.{key}" for key in parser[section])
            continue
        for key, value in parser[section].items():
            if key not in values[section]:
                unknown.append(f"{section}.{key}")
            else:
                values[section][key] = value
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    return _build(values)
