"""Configuration, RNG plumbing, orchestration, and the CLI."""

from .config import ExperimentConfig, OracleSettings, RunSettings, default_config, load_config
from .rng import RngStreamKey, derive_stream, stream_from_key
from .runner import (LEARNING_CSV_HEADER, OracleReport, ScenarioResult, reproduce,
                     run_oracle_validation, run_scenario)

__all__ = [
    "ExperimentConfig", "OracleSettings", "RunSettings", "default_config", "load_config",
    "RngStreamKey", "derive_stream", "stream_from_key",
    "LEARNING_CSV_HEADER", "OracleReport", "ScenarioResult", "reproduce",
    "run_oracle_validation", "run_scenario",
]
