"""Command-line front end.

Subcommands: analyze, simulate, reconstruct, sweep, predict.
Exit codes: 0 success / strategic verdict, 1 non-strategic verdict,
2 usage or configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import report
from .basis import DomainError, build_eigenbasis
from .model import ConfigError, emit_config, load_config
from .observability import strategic_check, verdict_to_dict
from .placement import rationality_predicate, sweep_placements
from .reconstruct import SingularSystemError, reconstruct_boundary_gradient
from .semigroup import (
    initial_field,
    read_series,
    synthesize_measurements,
    write_series,
)

EXIT_OK = 0
EXIT_NON_STRATEGIC = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradsense",
        description="Boundary-gradient strategic sensor analysis on the disk",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="strategic verdict for a configuration")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="also write the verdict JSON to a file")

    p = sub.add_parser("simulate", help="synthesize sensor measurements")
    p.add_argument("config")
    p.add_argument("--z0", required=True,
                   help="initial field preset: mode:n,m,branch | bump:thetac,width | poly:rcos")
    p.add_argument("--samples", type=int, default=128)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="measurements.csv")

    p = sub.add_parser("reconstruct", help="recover the arc boundary gradient")
    p.add_argument("config")
    p.add_argument("measurements")
    p.add_argument("--reg", type=float, default=1e-10)
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("-o", "--output", default="gradient.csv")

    p = sub.add_parser("sweep", help="rank candidate sensor placements")
    p.add_argument("config")
    p.add_argument("--grid", required=True,
                   help="JSON file with a list of angle tuples")
    p.add_argument("-o", "--output", default="ranking.csv")

    p = sub.add_parser("predict", help="angle-rationality placement predicate")
    p.add_argument("config")
    p.add_argument("--J", type=int, default=None,
                   help="unstable-mode count (default: from the truncated basis)")
    p.add_argument("--qmax", type=int, default=10 ** 6)
    p.add_argument("--tol", type=float, default=1e-9)
    return parser


def _cmd_analyze(args) -> int:
    config = load_config(args.config)
    verdict = strategic_check(config)
    payload = report.json_bytes(verdict_to_dict(verdict))
    sys.stdout.write(payload.decode("utf-8"))
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(payload)
    return EXIT_OK if verdict.strategic else EXIT_NON_STRATEGIC


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    z0 = initial_field(args.z0, config.domain.a)
    series = synthesize_measurements(config, z0, args.samples,
                                     noise_sigma=args.noise, seed=args.seed)
    write_series(series, args.output, config)
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    config = load_config(args.config)
    series = read_series(args.measurements)
    result = reconstruct_boundary_gradient(series, config, reg_param=args.reg,
                                           grid_size=args.grid)
    rows = [
        [float(t), float(g)]
        for t, g in zip(result.grid_thetas, result.boundary_gradient)
    ]
    with open(args.output, "wb") as fh:
        fh.write(report.csv_bytes(["theta", "g_tangential"], rows))
    meta = {
        "residual": result.residual,
        "reg_param": result.reg_param,
        "config_digest": report.digest(emit_config(config)),
    }
    with open(args.output + ".meta.json", "wb") as fh:
        fh.write(report.json_bytes(meta))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    with open(args.grid, "r", encoding="utf-8") as fh:
        grid = json.load(fh)
    if not isinstance(grid, list) or not grid:
        raise ConfigError("grid: expected a non-empty JSON list of angle tuples")
    ranking = sweep_placements(config, grid)
    q = len(config.sensors)
    header = [f"theta{i + 1}" for i in range(q)] + ["lambda_min", "strategic"]
    rows = [list(angles) + [lam, flag] for angles, lam, flag in ranking]
    with open(args.output, "wb") as fh:
        fh.write(report.csv_bytes(header, rows))
    return EXIT_OK


def _cmd_predict(args) -> int:
    config = load_config(args.config)
    if len(config.sensors) < 2:
        raise ConfigError("predict requires at least two sensors")
    J = args.J
    if J is None:
        J = max(1, build_eigenbasis(config.domain.a, config.trunc).unstable_count)
    t1 = config.sensors[0].midangle()
    t2 = config.sensors[1].midangle()
    rep = rationality_predicate(t1, t2, J, q_max=args.qmax, tol=args.tol)
    payload = {
        "theta_diff": rep.theta_diff,
        "predicted_strategic": rep.predicted_strategic,
        "verdicts": [
            {
                "n0": v.n0,
                "value": v.value,
                "best_rational": f"{v.numerator}/{v.denominator}",
                "error": v.error,
                "rational": v.rational,
            }
            for v in rep.verdicts
        ],
    }
    sys.stdout.write(report.json_text(payload))
    return EXIT_OK


_COMMANDS = {
    "analyze": _cmd_analyze,
    "simulate": _cmd_simulate,
    "reconstruct": _cmd_reconstruct,
    "sweep": _cmd_sweep,
    "predict": _cmd_predict,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (SingularSystemError, DomainError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry():
    sys.exit(run())


if __name__ == "__main__":
    entry()
