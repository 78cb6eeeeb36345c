"""Command-line interface.

Subcommands: overlap, detect, learn, thermo, oracle, reproduce.
Exit codes: 0 success, 1 validation/configuration error, 2 runtime or
integration error (including failed oracle tolerances).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from ..detector import DetectionModel, DetectorParams, error_prob, pg_classical, pg_quantum
from ..errors import ConfigError, IntegrationError, ValidationError
from ..modes import (ModeParams, make_exponential_mode, overlap_exponential_closed_form,
                     overlap_quadrature)
from ..source import BathParams
from ..thermo import scaled_summary, thermo_summary
from .config import default_config, load_config, parse_mu
from .runner import reproduce, run_oracle_validation, run_scenario

__all__ = ["main", "entry", "build_parser"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are validation
        raise _UsageError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="configuration file (key=value sections)")
    p.add_argument("--seed", type=int, default=None, help="unsigned 64-bit run seed")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="stdout format for printing commands")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="photonagent",
                     description="optical learning-agent simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("overlap", help="print the mode overlap for given parameters")
    _add_common(p)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--gamma-true", type=float, required=True)
    p.add_argument("--delta-true", type=float, required=True)
    p.add_argument("--quadrature", action="store_true",
                   help="also evaluate by Simpson quadrature")

    p = sub.add_parser("detect", help="print the click probabilities")
    _add_common(p)
    p.add_argument("--model", choices=("quantum", "classical", "both"), default="both")
    p.add_argument("--overlap", type=float, required=True)
    p.add_argument("--chi", type=float, default=1.0)
    p.add_argument("--mu", default="inf")

    p = sub.add_parser("learn", help="run the learning experiment from a config")
    _add_common(p)

    p = sub.add_parser("thermo", help="print thermodynamic summaries")
    _add_common(p)
    p.add_argument("--model", choices=("quantum", "classical"), default="quantum")
    p.add_argument("--overlap", type=float, required=True)
    p.add_argument("--chi", type=float, default=1.0)
    p.add_argument("--mu", default="2")

    p = sub.add_parser("oracle", help="validate the master-equation oracles")
    _add_common(p)

    p = sub.add_parser("reproduce", help="run a canned figure configuration")
    _add_common(p)
    p.add_argument("which", choices=("fig2", "fig4"))
    return parser


def _config_from_args(args) -> "ExperimentConfig":
    if args.config is not None:
        cfg = load_config(args.config)
        if args.seed is not None or args.out is not None:
            from dataclasses import replace
            run = replace(cfg.run,
                          **({"seed": args.seed} if args.seed is not None else {}),
                          **({"output_dir": args.out} if args.out is not None else {}))
            cfg = replace(cfg, run=run)
        return cfg
    return default_config(seed=args.seed, output_dir=args.out)


def _emit(args, payload: dict) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        for key, value in payload.items():
            print(f"{key}={value:.12g}" if isinstance(value, float) else f"{key}={value}")


def _cmd_overlap(args) -> int:
    control = ModeParams(args.gamma, args.delta)
    signal = ModeParams(args.gamma_true, args.delta_true)
    payload = {"overlap": overlap_exponential_closed_form(control, signal).gamma_overlap}
    if args.quadrature:
        payload["overlap_quadrature"] = overlap_quadrature(
            make_exponential_mode(control), make_exponential_mode(signal)).gamma_overlap
    _emit(args, payload)
    return 0


def _detector_from(args) -> DetectorParams:
    return DetectorParams(kappa=1000.0, bath=BathParams(parse_mu(str(args.mu))),
                          chi=args.chi, eta=1.0)


def _cmd_detect(args) -> int:
    det = _detector_from(args)
    payload = {}
    if args.model in ("quantum", "both"):
        payload["p_g_quantum"] = pg_quantum(args.overlap, det)
        payload["p_e_quantum"] = error_prob(DetectionModel.QUANTUM, args.overlap, det)
    if args.model in ("classical", "both"):
        payload["p_g_classical"] = pg_classical(args.overlap, det)
        payload["p_e_classical"] = error_prob(DetectionModel.CLASSICAL, args.overlap, det)
    _emit(args, payload)
    return 0


def _cmd_thermo(args) -> int:
    det = _detector_from(args)
    model = DetectionModel(args.model)
    w_s, df_s, q_s = scaled_summary(model, args.overlap, det)
    payload = {"p_abs": w_s, "w_avg_scaled": w_s, "df_scaled": df_s, "q_scaled": q_s}
    if math.isfinite(det.bath.mu):
        summary = thermo_summary(model, args.overlap, det)
        payload.update({"w_avg": summary.w_avg, "df": summary.df, "q": summary.q})
    _emit(args, payload)
    return 0


def _cmd_learn(args) -> int:
    cfg = _config_from_args(args)
    result = run_scenario(cfg)
    for path in result.csv_paths:
        print(path)
    print(result.manifest_path)
    return 0


def _cmd_oracle(args) -> int:
    cfg = _config_from_args(args)
    out = args.out if args.out is not None else cfg.run.output_dir
    report = run_oracle_validation(cfg, out)
    for case in report.cases:
        status = "PASS" if case.passed and not case.error else "FAIL"
        detail = case.error if case.error else f"deviation={case.deviation:.3e}"
        print(f"[{status}] {case.label}: {detail} (tol {case.tolerance:g})")
    print(report.csv_path)
    print(report.summary_path)
    return 0 if report.all_passed else 2


def _cmd_reproduce(args) -> int:
    cfg = _config_from_args(args)
    out = args.out if args.out is not None else cfg.run.output_dir
    result = reproduce(args.which, cfg, out)
    for path in result.csv_paths:
        print(path)
    print(result.manifest_path)
    return 0


_COMMANDS = {
    "overlap": _cmd_overlap,
    "detect": _cmd_detect,
    "learn": _cmd_learn,
    "thermo": _cmd_thermo,
    "oracle": _cmd_oracle,
    "reproduce": _cmd_reproduce,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValidationError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())
