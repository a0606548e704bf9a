"""``rlnc-tdd`` command line: optimize, evaluate and simulate scenarios.

Exit codes: 0 success, 2 invalid configuration, 3 policy/scenario mismatch,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional

from . import tables
from .analysis import evaluate, expected_energy, expected_time, full_duplex_energy, full_duplex_time
from .config import ConfigError, ScenarioConfig, load_scenario
from .errors import DomainError, PolicyInfeasibleError, UnboundedSearchError
from .markov import Policy
from .simulator import MODES, SimulationConfig, run_trials

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISMATCH = 3
EXIT_NUMERIC = 4

EVALUATE_HEADER = ["scheme", "Pe", "Pe_ack", "M", "n", "E_M_joules", "T_M_seconds", "energy_per_bit"]
SIMULATE_HEADER = [
    "mode", "trials", "seed", "mean_E", "ci95_E", "mean_T", "ci95_T", "analytic_E", "analytic_T", "within_3se",
]


class PolicyMismatch(Exception):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".16e")


def _emit(rows, header, out: Optional[str]):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_policy_file(path: str, scenario: ScenarioConfig) -> tuple[Policy, str]:
    try:
        table = tables.read_table(path)
    except FileNotFoundError:
        raise ConfigError("policy", f"no such file: {path}") from None
    except DomainError as exc:
        raise ConfigError("policy", str(exc)) from None
    if table["M"] != scenario.coding.block_size:
        raise PolicyMismatch(
            f"policy table has M = {table['M']} but the scenario has block_size = {scenario.coding.block_size}"
        )
    try:
        return tables.table_policy(table), table["objective"]
    except PolicyInfeasibleError as exc:
        raise ConfigError("policy", str(exc)) from None


def cmd_optimize(args, scenario: ScenarioConfig) -> int:
    link, coding = scenario.link, scenario.coding
    objectives = ["energy", "time"] if scenario.objective == "both" else [scenario.objective]
    for objective in objectives:
        result = tables.cached_optimize(link, coding, objective)
        table = tables.policy_table(result.policy, objective, link, coding)
        summary = f"objective={objective} value={fmt(result.objective)} N={list(result.policy)}"
        if args.out:
            out = Path(args.out)
            if len(objectives) > 1:
                out = out.with_name(f"{out.stem}.{objective}{out.suffix or '.json'}")
            tables.write_table(out, table)
            print(summary)
        else:
            print(json.dumps(table))
            print(summary, file=sys.stderr)
    return EXIT_OK


def _scheme_policies(link, coding, fixed):
    policies = {}
    for objective in ("energy", "time"):
        if objective in fixed:
            policies[objective] = fixed[objective]
        else:
            policies[objective] = tables.cached_optimize(link, coding, objective).policy
    return policies


def cmd_evaluate(args, scenario: ScenarioConfig) -> int:
    fixed = {}
    if args.policy:
        policy, objective = _load_policy_file(args.policy, scenario)
        fixed[objective] = policy

    rows = []
    for link, coding in scenario.points():
        policies = _scheme_policies(link, coding, fixed)
        M, n = coding.block_size, coding.payload_bits
        common = [fmt(link.pkt_erasure), fmt(link.ack_erasure), M, n]
        for scheme, objective in (("TDD-E", "energy"), ("TDD-T", "time")):
            report = evaluate(policies[objective], link, coding)
            rows.append([scheme, *common, fmt(report.total_energy), fmt(report.total_time), fmt(report.energy_per_bit)])
        e_fd = full_duplex_energy(link, coding)
        t_fd = full_duplex_time(link, coding)
        rows.append(["FD", *common, fmt(e_fd), fmt(t_fd), fmt(e_fd / (M * n))])
    _emit(rows, EVALUATE_HEADER, args.out)
    return EXIT_OK


def _simulation_config(args, scenario: ScenarioConfig) -> SimulationConfig:
    sim = dict(scenario.simulation)
    if args.trials is not None:
        sim["trials"] = args.trials
    if args.seed is not None:
        sim["seed"] = args.seed
    if args.mode is not None:
        sim["mode"] = args.mode
    for key in ("trials", "seed"):
        if key not in sim:
            raise ConfigError(f"simulation.{key}", "required for simulate (config or command line)")
    try:
        return SimulationConfig(
            trials=sim["trials"],
            seed=sim["seed"],
            mode=sim.get("mode", "model-faithful"),
            field_bits=sim.get("field_bits"),
        )
    except DomainError as exc:
        raise ConfigError("simulation", str(exc)) from None


def cmd_simulate(args, scenario: ScenarioConfig) -> int:
    config = _simulation_config(args, scenario)
    objective = "time" if scenario.objective == "time" else "energy"
    fixed = None
    if args.policy:
        fixed, _ = _load_policy_file(args.policy, scenario)

    rows = []
    for link, coding in scenario.points():
        policy = fixed if fixed is not None else tables.cached_optimize(link, coding, objective).policy
        analytic_e = expected_energy(policy, link, coding)[-1]
        analytic_t = expected_time(policy, link, coding)[-1]
        res = run_trials(policy, link, coding, config)
        rows.append([
            config.mode, config.trials, config.seed,
            fmt(res.mean_energy), fmt(res.ci95_energy), fmt(res.mean_time), fmt(res.ci95_time),
            fmt(analytic_e), fmt(analytic_t),
            "true" if res.agrees_with(analytic_e, analytic_t) else "false",
        ])
    _emit(rows, SIMULATE_HEADER, args.out)
    return EXIT_OK


COMMANDS = {"optimize": cmd_optimize, "evaluate": cmd_evaluate, "simulate": cmd_simulate}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rlnc-tdd",
        description="Energy/time analysis of random linear network coding over TDD erasure links.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="scenario JSON file, or a bundled name (fig4, fig5, fig6)")
    parser.add_argument("--policy", help="policy table JSON to use instead of optimizing")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--seed", type=int, help="simulation seed (unsigned 64-bit)")
    parser.add_argument("--trials", type=int, help="number of simulated blocks")
    parser.add_argument("--mode", choices=MODES, help="receiver model for simulate")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.config)
        return COMMANDS[args.command](args, scenario)
    except ConfigError as exc:
        print(f"rlnc-tdd: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PolicyMismatch as exc:
        print(f"rlnc-tdd: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (UnboundedSearchError, DomainError, ArithmeticError) as exc:
        print(f"rlnc-tdd: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
