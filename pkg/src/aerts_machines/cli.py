"""Command-line front end.

    aerts-machines sqm --gamma 0:3.14159:7 --trials 100000 --format csv
    aerts-machines epsilon --gamma 1.0 --epsilon 0.5
    aerts-machines bell --scenario uniform-band --trials 0 --format json
    aerts-machines lhv
    aerts-machines quantum --gamma 1.0471975512

Exit codes: 0 success, 1 internal or I/O error, 2 bad flags or parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from . import bell_harness as bell
from . import quantum_core as qc
from . import sqm_engine as sqm
from .stats import FrequencyEstimate
from .streams import run_blocked

SEED_ENV = "AERTS_MACHINES_SEED"
DEFAULT_SEED = 42
DEFAULT_TRIALS = 100_000
DEFAULT_GAMMA = f"0:{math.pi!r}:9"
JSON_DIGITS = 12

SCENARIOS = {
    "uniform-band": bell.UniformBand,
    "fixed-break-band": bell.FixedBreakBand,
    "pre-broken-band": bell.PreBrokenBand,
    "quantum-singlet": bell.QuantumSinglet,
}


class UsageError(Exception):
    """Bad parameter value; reported with exit code 2."""


@dataclass
class Report:
    command: str
    config: dict[str, Any]
    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)


def parse_gamma(text: str) -> list[float]:
    """A single angle in radians, or ``start:stop:steps`` (inclusive, evenly spaced)."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            values = [float(parts[0])]
        elif len(parts) == 3:
            start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
            if steps < 0:
                raise UsageError(f"--gamma: negative step count in {text!r}")
            if steps == 1:
                values = [start]
            else:
                values = [start + (stop - start) * i / (steps - 1) for i in range(steps)]
        else:
            raise UsageError(f"--gamma: expected a number or start:stop:steps, got {text!r}")
    except ValueError:
        raise UsageError(f"--gamma: cannot parse {text!r}") from None
    if not all(math.isfinite(g) for g in values):
        raise UsageError(f"--gamma: non-finite angle in {text!r}")
    return values


def _setup(gamma: float) -> tuple[qc.UnitVector3, qc.UnitVector3]:
    """Measurement axis z and a particle/state direction at angle gamma from it."""
    u = qc.Z_HAT
    return sqm.direction_at_angle(u, gamma), u


def _probability_rows(cfg, analytic, sampler, extra: Optional[dict] = None) -> tuple[list, list]:
    columns = ["gamma"] + (list(extra) if extra else []) + ["p_plus_analytic"]
    if cfg.trials > 0:
        columns += ["p_plus_empirical", "std_err", "trials", "seed"]
    rows = []
    for k, g in enumerate(parse_gamma(cfg.gamma)):
        v, u = _setup(g)
        row = {"gamma": g, **(extra or {}), "p_plus_analytic": analytic(v, u)}
        if cfg.trials > 0:
            est = sampler(v, u, k)
            row.update(
                p_plus_empirical=est.p_hat, std_err=est.std_err, trials=cfg.trials, seed=cfg.seed
            )
        rows.append(row)
    return columns, rows


def cmd_sqm(cfg) -> Report:
    columns, rows = _probability_rows(
        cfg,
        lambda v, u: sqm.analytic_probability(v, u)[0],
        lambda v, u, k: sqm.plus_frequency(
            v, u, sqm.Uniform(), cfg.trials, cfg.seed, (k,), cfg.workers
        ),
    )
    return Report("sqm", _config(cfg), columns, rows)


def cmd_epsilon(cfg) -> Report:
    if cfg.epsilon is None:
        raise UsageError("epsilon: --epsilon is required")
    if not 0.0 <= cfg.epsilon <= 1.0:
        raise UsageError(f"--epsilon must lie in [0, 1], got {cfg.epsilon}")
    profile = sqm.Epsilon(cfg.epsilon)
    columns, rows = _probability_rows(
        cfg,
        lambda v, u: sqm.analytic_epsilon_probability(v, u, cfg.epsilon)[0],
        lambda v, u, k: sqm.plus_frequency(v, u, profile, cfg.trials, cfg.seed, (k,), cfg.workers),
        extra={"epsilon": cfg.epsilon},
    )
    return Report("epsilon", _config(cfg), columns, rows)


def cmd_quantum(cfg) -> Report:
    def sampler(v, u, k):
        p = qc.born_probability(qc.state_from_direction(v), u)
        hits = run_blocked(
            lambda rng, n: [qc.sample_spin_counts(p, n, rng)], cfg.trials, cfg.seed, (k,), cfg.workers
        )
        return FrequencyEstimate(int(hits[0]), cfg.trials)

    columns, rows = _probability_rows(
        cfg, lambda v, u: qc.born_probability(qc.state_from_direction(v), u), sampler
    )
    return Report("quantum", _config(cfg), columns, rows)


def cmd_bell(cfg) -> Report:
    if cfg.scenario is None:
        raise UsageError(f"bell: --scenario is required (one of {', '.join(SCENARIOS)})")
    scenario = SCENARIOS[cfg.scenario]()
    analytic = bell.chsh_scenario(scenario, 0)
    columns = ["setting", "analytic"]
    summary: dict[str, Any] = {"s_value": analytic.s_value}
    empirical = None
    if cfg.trials > 0:
        columns += ["empirical", "std_err"]
        empirical = bell.chsh_scenario(scenario, cfg.trials, cfg.seed, cfg.workers)
        summary.update(
            s_empirical=empirical.s_value,
            s_std_err=empirical.combined_standard_error,
            trials=cfg.trials,
        )
    rows = []
    for name, est in analytic.estimates.items():
        row = {"setting": name, "analytic": est.value}
        if empirical is not None:
            emp = empirical.estimates[name]
            row.update(empirical=emp.value, std_err=emp.standard_error)
        rows.append(row)
    return Report("bell", _config(cfg), columns, rows, summary)


def cmd_lhv(cfg) -> Report:
    strategies = bell.lhv_strategies()
    columns = ["o_a", "o_a_prime", "o_b", "o_b_prime", "s_value"]
    rows = [
        {
            "o_a": s.o_a,
            "o_a_prime": s.o_a_prime,
            "o_b": s.o_b,
            "o_b_prime": s.o_b_prime,
            "s_value": s.s_value,
        }
        for s in strategies
    ]
    summary = {"max_s": bell.lhv_maximum(), "strategies": len(strategies)}
    return Report("lhv", _config(cfg), columns, rows, summary)


COMMANDS = {
    "sqm": cmd_sqm,
    "epsilon": cmd_epsilon,
    "bell": cmd_bell,
    "lhv": cmd_lhv,
    "quantum": cmd_quantum,
}


def _config(cfg) -> dict[str, Any]:
    # workers and output path are left out: they must not change the bytes
    out = {"command": cfg.command, "trials": cfg.trials, "seed": cfg.seed, "format": cfg.format}
    if cfg.command in ("sqm", "epsilon", "quantum"):
        out["gamma"] = cfg.gamma
    if cfg.command == "epsilon":
        out["epsilon"] = cfg.epsilon
    if cfg.command == "bell":
        out["scenario"] = cfg.scenario
    return out


def _round(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(f"{value:.{JSON_DIGITS}g}")
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    return value


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.{JSON_DIGITS}g}"
    return str(value)


def render(report: Report, fmt: str) -> bytes:
    if fmt == "json":
        doc = {"command": report.command, "config": report.config, "results": report.rows}
        if report.summary:
            doc["summary"] = report.summary
        return (json.dumps(_round(doc), sort_keys=True, indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_cell(row[c]) for c in report.columns])
        return buf.getvalue().encode()
    if fmt == "table":
        cells = [report.columns] + [[_cell(r[c]) for c in report.columns] for r in report.rows]
        widths = [max(len(line[i]) for line in cells) for i in range(len(report.columns))]
        lines = ["  ".join(s.rjust(w) for s, w in zip(line, widths)) for line in cells]
        lines.insert(1, "  ".join("-" * w for w in widths))
        for k, v in report.summary.items():
            lines.append(f"{k} = {_cell(v)}")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed {value} is not a 64-bit unsigned integer")
    return value


def _trials(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid trial count {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("--trials must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aerts-machines",
        description="Spin quantum-machine, eps-model and elastic-band Bell simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trials", type=_trials, default=DEFAULT_TRIALS,
                        help="Monte Carlo trials per estimate; 0 = analytic only")
    common.add_argument("--seed", type=_seed, default=None,
                        help=f"master seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--workers", type=int, default=1,
                        help="threads for Monte Carlo blocks (does not change results)")

    for name, helptext in (
        ("sqm", "uniform elastic spin quantum-machine"),
        ("quantum", "exact spin-1/2 Born-rule oracle"),
        ("epsilon", "spin machine with the break confined to eps*[-1, 1)"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--gamma", default=DEFAULT_GAMMA,
                       help="angle between state and axis (radians) or start:stop:steps")
        if name == "epsilon":
            p.add_argument("--epsilon", type=float, default=None, help="half-width of breakable segment")
    p = sub.add_parser("bell", parents=[common], help="CHSH value of a Bell scenario")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), default=None)
    sub.add_parser("lhv", parents=[common], help="enumerate local deterministic strategies")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        cfg = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if cfg.seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            cfg.seed = _seed(env) if env else DEFAULT_SEED
        except argparse.ArgumentTypeError as exc:
            print(f"aerts-machines: error: ${SEED_ENV}: {exc}", file=sys.stderr)
            return 2
    if cfg.workers < 1:
        print("aerts-machines: error: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        report = COMMANDS[cfg.command](cfg)
        payload = render(report, cfg.format)
    except UsageError as exc:
        print(f"aerts-machines {cfg.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any crash maps to exit code 1
        print(f"aerts-machines: internal error: {exc}", file=sys.stderr)
        return 1
    try:
        if cfg.out:
            with open(cfg.out, "wb") as fh:
                fh.write(payload)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
    except OSError as exc:
        print(f"aerts-machines: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0
