"""Policy look-up tables: JSON serialization and an on-disk cache.

A table is ``{"M": int, "N": [int, ...], "objective": "energy"|"time",
"params_hash": hex}``. The hash identifies the link and coding parameters the
table was computed for.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict
from pathlib import Path
from typing import Optional

from .analysis import expected_energy, expected_time
from .errors import DomainError
from .markov import CodingParameters, LinkParameters, Policy
from .optimizer import OBJECTIVES, OptimizationResult, optimize

CACHE_ENV = "RLNC_TDD_CACHE"


def params_hash(link: LinkParameters, coding: CodingParameters) -> str:
    blob = json.dumps({"link": asdict(link), "coding": asdict(coding)}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def policy_table(policy: Policy, objective: str, link: LinkParameters, coding: CodingParameters) -> dict:
    return {
        "M": policy.M,
        "N": list(policy.n_per_state),
        "objective": objective,
        "params_hash": params_hash(link, coding),
    }


def write_table(path, table: dict):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(table, indent=2) + "\n")
    os.replace(tmp, path)


def read_table(path) -> dict:
    """Load and validate a table; raises DomainError on a malformed one."""
    try:
        table = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(table, dict):
        raise DomainError(f"{path}: policy table must be a JSON object")
    for key in ("M", "N", "objective"):
        if key not in table:
            raise DomainError(f"{path}: policy table lacks {key!r}")
    if table["objective"] not in OBJECTIVES:
        raise DomainError(f"{path}: objective must be one of {OBJECTIVES}")
    if not isinstance(table["N"], list) or len(table["N"]) != table["M"]:
        raise DomainError(f"{path}: N must be a list of length M")
    return table


def table_policy(table: dict) -> Policy:
    return Policy(tuple(table["N"]))


def cache_dir() -> Optional[Path]:
    value = os.environ.get(CACHE_ENV)
    return Path(value) if value else None


def _cache_path(directory: Path, link, coding, objective) -> Path:
    return directory / f"{params_hash(link, coding)}-{objective}.json"


def store(result: OptimizationResult, link: LinkParameters, coding: CodingParameters) -> Optional[Path]:
    directory = cache_dir()
    if directory is None:
        return None
    directory.mkdir(parents=True, exist_ok=True)
    path = _cache_path(directory, link, coding, result.kind)
    write_table(path, policy_table(result.policy, result.kind, link, coding))
    return path


def cached_optimize(link: LinkParameters, coding: CodingParameters, objective: str) -> OptimizationResult:
    """Optimal policy, read from the cache when a table for these parameters exists."""
    directory = cache_dir()
    if directory is not None:
        path = _cache_path(directory, link, coding, objective)
        if path.exists():
            try:
                table = read_table(path)
            except DomainError:
                table = None
            if table is not None and table.get("params_hash") == params_hash(link, coding):
                policy = table_policy(table)
                evaluate = expected_energy if objective == "energy" else expected_time
                costs = evaluate(policy, link, coding)
                return OptimizationResult(
                    policy=policy,
                    objective_per_state=tuple(costs),
                    objective=costs[-1],
                    search_bound_hit=(False,) * policy.M,
                    kind=objective,
                )
    result = optimize(link, coding, objective)
    store(result, link, coding)
    return result
